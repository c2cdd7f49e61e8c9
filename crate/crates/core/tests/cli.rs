//! End-to-end runs of the `qbwg` binary.

use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn qbwg(out: &Path, args: &[&str]) -> (i32, Value) {
    let status = Command::new(env!("CARGO_BIN_EXE_qbwg"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    let code = status.status.code().unwrap();
    let summary = fs::read_to_string(out.join("summary.json"))
        .ok()
        .map(|s| serde_json::from_str(&s).unwrap())
        .unwrap_or(Value::Null);
    (code, summary)
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

#[test]
fn spectrum_reports_two_bound_states_at_the_cutoff() {
    let dir = tempfile::tempdir().unwrap();
    let (code, summary) = qbwg(dir.path(), &["spectrum", "--omega0", "1.0"]);
    assert_eq!(code, 0);
    let r = &summary["results"];
    assert_eq!(r["M"], 2);
    assert_eq!(r["states"].as_array().unwrap().len(), 2);
    assert_eq!(summary["config"]["params"]["omega0"], 1.0);
    assert!(summary["timing_seconds"].as_f64().is_some());
    assert!(dir.path().join("spectrum.csv").exists());
}

#[test]
fn dynamics_without_bound_states_drains_the_battery() {
    let dir = tempfile::tempdir().unwrap();
    let (code, summary) = qbwg(dir.path(), &["dynamics", "--omega0", "3.0", "--dt", "0.0125", "--t-end", "200"]);
    assert_eq!(code, 0);
    assert_eq!(summary["results"]["spectrum"]["M"], 1);
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let last: f64 = column(&csv, "energy").last().unwrap().parse().unwrap();
    assert!(last < 0.01, "{last}");
}

#[test]
fn physical_bridge_matches_waveguide_geometry() {
    for (side, expected) in [("0.45", 1.00), ("0.27", 0.60)] {
        let dir = tempfile::tempdir().unwrap();
        let (code, _) = qbwg(dir.path(), &["physical", "--a", side, "--b", side, "--lambda0", "637"]);
        assert_eq!(code, 0);
        let csv = fs::read_to_string(dir.path().join("physical.csv")).unwrap();
        let ratio: f64 = column(&csv, "omega0_over_omega11")[0].parse().unwrap();
        assert!((ratio - expected).abs() < 0.01 * expected, "{side}: {ratio}");
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let run = |workers: &str| {
        let dir = tempfile::tempdir().unwrap();
        let (code, _) = qbwg(dir.path(), &["sweep", "--sweep", "dz:0:2:21", "--omega0", "1.4", "--workers", workers]);
        assert_eq!(code, 0);
        fs::read_to_string(dir.path().join("sweep.csv")).unwrap()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{ "omega0": 3.0, "gamma11": 0.5, "delta_z": 0.1 }"#).unwrap();
    let (code, summary) = qbwg(dir.path(), &["spectrum", "--config", cfg.to_str().unwrap(), "--omega0", "1.0"]);
    assert_eq!(code, 0);
    assert_eq!(summary["config"]["params"]["omega0"], 1.0);
    assert_eq!(summary["results"]["M"], 2);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(qbwg(dir.path(), &["dynamics", "--dt", "0.5"]).0, 2);
    assert_eq!(qbwg(dir.path(), &["spectrum", "--gamma11", "-1"]).0, 2);
    assert_eq!(qbwg(dir.path(), &["sweep"]).0, 2);
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{ "omega_zero": 1.0 }"#).unwrap();
    assert_eq!(qbwg(dir.path(), &["spectrum", "--config", cfg.to_str().unwrap()]).0, 2);
}

#[test]
fn partial_sweep_lists_failed_points() {
    let dir = tempfile::tempdir().unwrap();
    let (code, summary) = qbwg(dir.path(), &["sweep", "--sweep", "omega0:-1:0.5:4"]);
    assert_eq!(code, 4);
    let errors = summary["errors"].as_array().unwrap();
    // ω₀ = −1, −0.5 and 0 are all rejected; 0.5 succeeds.
    assert_eq!(errors.len(), 3);
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn fig3_grid_hits_the_quoted_separations() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = qbwg(dir.path(), &["figure", "--preset", "fig3"]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(dir.path().join("fig3_spectrum.csv")).unwrap();
    let dz: Vec<f64> = column(&csv, "axis_value").iter().map(|s| s.parse().unwrap()).collect();
    assert!(dz.contains(&0.3) && dz.contains(&1.7));
    assert!(dir.path().join("fig3_extrema.csv").exists());
    assert!(dir.path().join("fig3_index.csv").exists());
}

#[test]
fn fig4_map_has_two_bound_states_at_large_separation() {
    let dir = tempfile::tempdir().unwrap();
    let (code, summary) = qbwg(dir.path(), &["figure", "--preset", "fig4"]);
    assert_eq!(code, 0);
    assert_eq!(summary["results"]["omega0_1.4_delta_z_1.0"]["M"], 2);
    let csv = fs::read_to_string(dir.path().join("fig4_map.csv")).unwrap();
    let row = csv
        .lines()
        .skip(1)
        .find(|l| {
            let c: Vec<f64> = l.split(',').take(2).map(|x| x.parse().unwrap()).collect();
            c[0] == 1.4 && c[1] == 1.0
        })
        .unwrap();
    assert_eq!(row.split(',').nth(2), Some("2"));
}

#[test]
fn fig2_trajectories_meet_their_markers() {
    let dir = tempfile::tempdir().unwrap();
    let (code, summary) = qbwg(dir.path(), &["figure", "--preset", "fig2", "--dt", "0.0125", "--t-end", "300"]);
    assert_eq!(code, 0);
    let runs = summary["results"]["trajectories"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    for r in runs {
        let err = r["tail_error_vs_bound_states"].as_f64().unwrap();
        assert!(err < 0.02, "omega0 {}: {err}", r["omega0"]);
    }
    for w0 in ["3.0", "1.2", "1.0"] {
        assert!(dir.path().join(format!("fig2_trajectory_omega0_{w0}.csv")).exists());
    }
}
