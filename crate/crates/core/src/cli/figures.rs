//! Figure presets: each regenerates the data behind one set of plots.
//!
//! Presets fix Γ₁₁ = 0.5 and (where not swept) Δz = 0.1; only the solver
//! step, horizon, output directory and worker count are taken from the run
//! configuration.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{markers_csv, spectrum_json, steady_extrema, trajectory_report, Failure, Report, RunConfig};
use crate::dynamics::{solve_volterra, SolverConfig};
use crate::kernels::kernel_grid;
use crate::model::SystemParams;
use crate::par::{self, Execution};
use crate::spectrum::{find_bound_states, fmt_f64, linspace, spectrum_sweep, SweepAxis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
}

/// Transition frequencies of the three trajectories in the fig2 bundle:
/// no bound-state energy stored, one bound state, two bound states.
pub const FIG2_TRAJECTORIES: [f64; 3] = [3.0, 1.2, 1.0];
pub const FIG3_OMEGA0: [f64; 3] = [1.4, 1.2, 1.0];

pub(super) fn reproduce(preset: Preset, cfg: &RunConfig) -> Result<Report, Failure> {
    match preset {
        Preset::Fig2 => fig2(cfg),
        Preset::Fig3 => fig3(),
        Preset::Fig4 => fig4(),
    }
}

fn sweep_errors(points: &[crate::spectrum::SweepPoint], label: &str) -> Vec<Value> {
    points
        .iter()
        .filter_map(|p| {
            p.result
                .as_ref()
                .err()
                .map(|e| json!({ "file": label, "axis_value": p.value, "error": e }))
        })
        .collect()
}

fn fig2(cfg: &RunConfig) -> Result<Report, Failure> {
    let base = SystemParams::reference(1.0);
    let sweep = spectrum_sweep(&base, SweepAxis::Omega0, 0.5, 3.5, 61, Execution::Parallel)?;
    let mut files = vec![("fig2_spectrum.csv".to_string(), sweep.to_csv())];
    let mut errors = sweep_errors(&sweep.points, "fig2_spectrum.csv");
    let mut index = String::from("file,content\nfig2_spectrum.csv,bound-state energies and residues vs omega0\n");

    // The kernel grid does not depend on ω₀, so one grid serves all three runs.
    let solver = SolverConfig { ..cfg.solver };
    for &w0 in &FIG2_TRAJECTORIES {
        solver.validate(&base.with_omega0(w0))?;
    }
    let grid = kernel_grid(&base, solver.dt, solver.steps())?;
    let runs = par::map(Execution::Parallel, &FIG2_TRAJECTORIES, |&w0| -> Result<_, Failure> {
        let p = base.with_omega0(w0);
        let traj = solve_volterra(&p, &solver, &grid)?;
        let spectrum = find_bound_states(&p)?;
        let (summary, csv) = trajectory_report(&traj, &spectrum)?;
        Ok((w0, summary, csv, markers_csv(&spectrum, w0, solver.t_end, 10.0)))
    });
    let mut trajectories = vec![];
    for run in runs {
        match run {
            Ok((w0, summary, csv, markers)) => {
                let name = format!("fig2_trajectory_omega0_{w0:.1}.csv");
                let marker_name = format!("fig2_markers_omega0_{w0:.1}.csv");
                index.push_str(&format!("{name},QB energy and amplitudes vs t at omega0 = {w0:.1}\n"));
                index.push_str(&format!("{marker_name},long-time bound-state prediction at omega0 = {w0:.1}\n"));
                files.push((name, csv));
                files.push((marker_name, markers));
                trajectories.push(summary);
            }
            Err(Failure::Numerical(e)) => errors.push(json!({ "error": e.to_string() })),
            Err(other) => return Err(other),
        }
    }
    files.push(("fig2_index.csv".into(), index));
    let counts: Vec<Value> = sweep
        .points
        .iter()
        .map(|p| json!([p.value, p.result.as_ref().ok().map(|r| r.count)]))
        .collect();
    Ok(Report {
        results: json!({ "preset": "fig2", "counts": counts, "trajectories": trajectories }),
        files,
        errors,
    })
}

fn fig3() -> Result<Report, Failure> {
    let base = SystemParams::reference(1.4);
    let sweep = spectrum_sweep(&base, SweepAxis::DeltaZ, 0.0, 2.0, 41, Execution::Parallel)?;
    let mut errors = sweep_errors(&sweep.points, "fig3_spectrum.csv");
    let dz = linspace(0.0, 2.0, 41);
    let jobs: Vec<(f64, f64)> = FIG3_OMEGA0.iter().flat_map(|&w| dz.iter().map(move |&d| (w, d))).collect();
    let rows = par::map(Execution::Parallel, &jobs, |&(w0, d)| {
        find_bound_states(&SystemParams::reference(w0).with_delta_z(d)).map(|r| steady_extrema(&r, w0))
    });
    let mut csv = String::from("omega0,delta_z,M,degenerate,E_min,E_max\n");
    for (&(w0, d), row) in jobs.iter().zip(&rows) {
        match row {
            Ok(e) => csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_f64(w0),
                fmt_f64(d),
                e.count,
                e.degenerate,
                fmt_f64(e.energy_min),
                fmt_f64(e.energy_max)
            )),
            Err(err) => {
                errors.push(json!({ "file": "fig3_extrema.csv", "omega0": w0, "delta_z": d, "error": err.to_string() }));
                csv.push_str(&format!("{},{},,,,\n", fmt_f64(w0), fmt_f64(d)));
            }
        }
    }
    let index = "file,content\n\
                 fig3_spectrum.csv,bound-state energies and residues vs delta_z at omega0 = 1.4\n\
                 fig3_extrema.csv,long-time min/max of the QB energy vs delta_z for omega0 = 1.4 1.2 1.0\n";
    let counts: Vec<Value> = sweep
        .points
        .iter()
        .map(|p| json!([p.value, p.result.as_ref().ok().map(|r| (r.count, r.degenerate))]))
        .collect();
    Ok(Report {
        results: json!({ "preset": "fig3", "counts_and_degeneracy": counts }),
        files: vec![
            ("fig3_spectrum.csv".into(), sweep.to_csv()),
            ("fig3_extrema.csv".into(), csv),
            ("fig3_index.csv".into(), index.to_string()),
        ],
        errors,
    })
}

fn fig4() -> Result<Report, Failure> {
    let omegas: Vec<f64> = (1..=30).map(|k| k as f64 / 10.0).collect();
    let dz = linspace(0.0, 2.0, 21);
    let jobs: Vec<(f64, f64)> = omegas.iter().flat_map(|&w| dz.iter().map(move |&d| (w, d))).collect();
    let rows = par::map(Execution::Parallel, &jobs, |&(w0, d)| {
        find_bound_states(&SystemParams::reference(w0).with_delta_z(d)).map(|r| steady_extrema(&r, w0))
    });
    let mut errors = vec![];
    let mut map = String::from("omega0,delta_z,M,degenerate,E_max,W_max\n");
    let mut best: Vec<Option<(f64, f64)>> = vec![None; dz.len()];
    for (k, (&(w0, d), row)) in jobs.iter().zip(&rows).enumerate() {
        match row {
            Ok(e) => {
                map.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    fmt_f64(w0),
                    fmt_f64(d),
                    e.count,
                    e.degenerate,
                    fmt_f64(e.energy_max),
                    fmt_f64(e.ergotropy_max)
                ));
                let slot = &mut best[k % dz.len()];
                if slot.map_or(true, |(_, w)| e.ergotropy_max > w) {
                    *slot = Some((w0, e.ergotropy_max));
                }
            }
            Err(err) => {
                errors.push(json!({ "file": "fig4_map.csv", "omega0": w0, "delta_z": d, "error": err.to_string() }));
                map.push_str(&format!("{},{},,,,\n", fmt_f64(w0), fmt_f64(d)));
            }
        }
    }
    let mut opt = String::from("delta_z,best_omega0,W_max\n");
    for (d, b) in dz.iter().zip(&best) {
        match b {
            Some((w0, w)) => opt.push_str(&format!("{},{},{}\n", fmt_f64(*d), fmt_f64(*w0), fmt_f64(*w))),
            None => opt.push_str(&format!("{},,\n", fmt_f64(*d))),
        }
    }
    let probe = find_bound_states(&SystemParams::reference(1.4).with_delta_z(1.0))?;
    let index = "file,content\n\
                 fig4_map.csv,bound-state count and long-time maxima of energy and ergotropy over (omega0 delta_z)\n\
                 fig4_optimum.csv,ergotropy maximised over omega0 for each delta_z\n";
    Ok(Report {
        results: json!({ "preset": "fig4", "omega0_1.4_delta_z_1.0": spectrum_json(&probe) }),
        files: vec![
            ("fig4_map.csv".into(), map),
            ("fig4_optimum.csv".into(), opt),
            ("fig4_index.csv".into(), index.to_string()),
        ],
        errors,
    })
}
