//! Command-line front end: configuration, orchestration and output files.

mod figures;

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dynamics::{long_time_amplitude, solve_volterra, Scheme, SolverConfig, Trajectory};
use crate::error::Error;
use crate::kernels::kernel_grid;
use crate::model::{gamma11_from_physical, PhysicalWaveguide, SystemParams};
use crate::observables::{series_extrema, trajectory_csv, ObservableSeries};
use crate::par::{self, Execution};
use crate::spectrum::{find_bound_states, fmt_f64, spectrum_sweep, SpectrumResult, SweepAxis};

pub use figures::Preset;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    ConfigError = 2,
    NumericalFailure = 3,
    PartialSweep = 4,
}

#[derive(Debug, Parser)]
#[command(name = "qbwg", version, about = "Quantum battery charged through a rectangular waveguide")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON configuration file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Transition frequency ω₀/ω₁₁.
    #[arg(long, global = true)]
    pub omega0: Option<f64>,
    /// Radiation rate Γ₁₁/ω₁₁.
    #[arg(long, global = true)]
    pub gamma11: Option<f64>,
    /// Charger-battery separation in units of λ₁₁.
    #[arg(long, global = true)]
    pub dz: Option<f64>,
    /// Time step in units of 1/ω₁₁.
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Time horizon in units of 1/ω₁₁.
    #[arg(long, global = true)]
    pub t_end: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Sweep specification AXIS:LO:HI:N with AXIS one of omega0, delta_z, gamma11.
    #[arg(long, global = true)]
    pub sweep: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Trapezoid,
    PredictorCorrector,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Trapezoid => Scheme::TrapezoidProduct,
            SchemeArg::PredictorCorrector => Scheme::PredictorCorrector,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bound states for one parameter set.
    Spectrum,
    /// Exact amplitude dynamics and battery observables.
    Dynamics,
    /// Bound-state spectrum along a parameter axis (needs --sweep).
    Sweep,
    /// Long-time stored energy and ergotropy from the bound states.
    Steady,
    /// Convert a physical waveguide geometry to model units.
    Physical(PhysicalArgs),
    /// Regenerate the data behind a figure.
    Figure {
        #[arg(long, value_enum)]
        preset: Preset,
    },
}

#[derive(Debug, Clone, Args)]
pub struct PhysicalArgs {
    /// Transverse side a (μm).
    #[arg(long)]
    pub a: Option<f64>,
    /// Transverse side b (μm).
    #[arg(long)]
    pub b: Option<f64>,
    /// Emitter wavelength (nm).
    #[arg(long)]
    pub lambda0: Option<f64>,
    /// Emitter x position (μm), default a/2.
    #[arg(long)]
    pub x0: Option<f64>,
    /// Emitter y position (μm), default b/2.
    #[arg(long)]
    pub y0: Option<f64>,
    /// Dipole moment along z (Debye); enables the Γ₁₁ estimate.
    #[arg(long)]
    pub dipole: Option<f64>,
}

/// Parsed `AXIS:LO:HI:N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl FromStr for SweepSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(format!("sweep `{s}` must look like AXIS:LO:HI:N"));
        }
        let axis = parts[0].parse::<SweepAxis>().map_err(|e| e.to_string())?;
        let num = |x: &str| x.parse::<f64>().map_err(|_| format!("bad number `{x}` in sweep"));
        let n = parts[3].parse::<usize>().map_err(|_| format!("bad point count `{}`", parts[3]))?;
        if n < 2 {
            return Err("a sweep needs at least 2 points".into());
        }
        Ok(Self {
            axis,
            lo: num(parts[1])?,
            hi: num(parts[2])?,
            n,
        })
    }
}

/// Configuration file contents. Every entry is optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub omega0: Option<f64>,
    pub gamma11: Option<f64>,
    pub delta_z: Option<f64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub scheme: Option<Scheme>,
    pub sweep: Option<String>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub physical: Option<PhysicalFile>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalFile {
    pub a_um: Option<f64>,
    pub b_um: Option<f64>,
    pub lambda0_nm: Option<f64>,
    pub x0_um: Option<f64>,
    pub y0_um: Option<f64>,
    pub dipole_debye: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Spectrum,
    Dynamics,
    Sweep,
    Steady,
    Physical,
    Figure,
}

/// Fully resolved configuration, echoed into every summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: SystemParams,
    pub solver: SolverConfig,
    pub sweep: Option<SweepSpec>,
    pub out: PathBuf,
    pub workers: Option<usize>,
    pub physical: Option<PhysicalFile>,
    pub preset: Option<Preset>,
}

const DEBYE: f64 = 3.335_640_952e-30;

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self, String> {
        let file: FileConfig = match &cli.common.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?
            }
            None => FileConfig::default(),
        };
        let c = &cli.common;
        let (command, preset) = match &cli.command {
            Command::Spectrum => (CommandKind::Spectrum, None),
            Command::Dynamics => (CommandKind::Dynamics, None),
            Command::Sweep => (CommandKind::Sweep, None),
            Command::Steady => (CommandKind::Steady, None),
            Command::Physical(_) => (CommandKind::Physical, None),
            Command::Figure { preset } => (CommandKind::Figure, Some(*preset)),
        };
        let params = SystemParams {
            omega0: c.omega0.or(file.omega0).unwrap_or(1.0),
            gamma11: c.gamma11.or(file.gamma11).unwrap_or(0.5),
            delta_z: c.dz.or(file.delta_z).unwrap_or(0.1),
        };
        params.validate().map_err(|e| e.to_string())?;
        let solver = SolverConfig {
            dt: c.dt.or(file.dt).unwrap_or(0.01),
            t_end: c.t_end.or(file.t_end).unwrap_or(400.0),
            scheme: c.scheme.map(Scheme::from).or(file.scheme).unwrap_or(Scheme::TrapezoidProduct),
            tolerances: Default::default(),
        };
        if command == CommandKind::Dynamics {
            solver.validate(&params).map_err(|e| e.to_string())?;
        }
        let sweep = match c.sweep.clone().or(file.sweep) {
            Some(s) => Some(s.parse::<SweepSpec>()?),
            None => None,
        };
        if command == CommandKind::Sweep && sweep.is_none() {
            return Err("the sweep command needs --sweep AXIS:LO:HI:N".into());
        }
        let mut physical = file.physical;
        if let Command::Physical(p) = &cli.command {
            let mut merged = physical.unwrap_or_default();
            merged.a_um = p.a.or(merged.a_um);
            merged.b_um = p.b.or(merged.b_um);
            merged.lambda0_nm = p.lambda0.or(merged.lambda0_nm);
            merged.x0_um = p.x0.or(merged.x0_um);
            merged.y0_um = p.y0.or(merged.y0_um);
            merged.dipole_debye = p.dipole.or(merged.dipole_debye);
            if merged.a_um.is_none() || merged.b_um.is_none() || merged.lambda0_nm.is_none() {
                return Err("physical needs --a, --b and --lambda0".into());
            }
            physical = Some(merged);
        }
        if c.workers == Some(0) || file.workers == Some(0) {
            return Err("--workers must be at least 1".into());
        }
        Ok(Self {
            command,
            params,
            solver,
            sweep,
            out: c.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("qbwg-out")),
            workers: c.workers.or(file.workers),
            physical,
            preset,
        })
    }
}

/// Result of a command before it is written out.
pub(crate) struct Report {
    results: Value,
    files: Vec<(String, String)>,
    errors: Vec<Value>,
}

pub(crate) enum Failure {
    Config(String),
    Numerical(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => Failure::Config(e.to_string()),
            other => Failure::Numerical(other),
        }
    }
}

/// Parse arguments, run, write outputs and return the exit status.
pub fn main_with_args<I, T>(args: I) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitStatus::ConfigError
            } else {
                ExitStatus::Success
            };
        }
    };
    let cfg = match RunConfig::resolve(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("qbwg: configuration error: {msg}");
            return ExitStatus::ConfigError;
        }
    };
    run(&cfg)
}

/// Execute a resolved configuration.
pub fn run(cfg: &RunConfig) -> ExitStatus {
    let start = Instant::now();
    let outcome = par::with_workers(cfg.workers, || dispatch(cfg));
    let elapsed = start.elapsed().as_secs_f64();
    if let Err(e) = fs::create_dir_all(&cfg.out) {
        eprintln!("qbwg: cannot create {}: {e}", cfg.out.display());
        return ExitStatus::NumericalFailure;
    }
    let (status, summary) = match outcome {
        Ok(report) => {
            for (name, body) in &report.files {
                if let Err(e) = write_file(&cfg.out, name, body) {
                    eprintln!("qbwg: {e}");
                    return ExitStatus::NumericalFailure;
                }
            }
            let status = if report.errors.is_empty() {
                ExitStatus::Success
            } else {
                ExitStatus::PartialSweep
            };
            let files: Vec<&str> = report.files.iter().map(|(n, _)| n.as_str()).collect();
            let summary = json!({
                "status": status as i32,
                "config": cfg,
                "results": report.results,
                "errors": report.errors,
                "files": files,
                "timing_seconds": elapsed,
            });
            (status, summary)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("qbwg: configuration error: {msg}");
            return ExitStatus::ConfigError;
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("qbwg: numerical failure: {e}");
            let summary = json!({
                "status": ExitStatus::NumericalFailure as i32,
                "config": cfg,
                "error": e.to_string(),
                "timing_seconds": elapsed,
            });
            (ExitStatus::NumericalFailure, summary)
        }
    };
    let text = serde_json::to_string_pretty(&summary).unwrap_or_default();
    if let Err(e) = write_file(&cfg.out, "summary.json", &text) {
        eprintln!("qbwg: {e}");
        return ExitStatus::NumericalFailure;
    }
    println!("{text}");
    status
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<(), String> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn dispatch(cfg: &RunConfig) -> Result<Report, Failure> {
    match cfg.command {
        CommandKind::Spectrum => cmd_spectrum(cfg),
        CommandKind::Dynamics => cmd_dynamics(cfg),
        CommandKind::Sweep => cmd_sweep(cfg),
        CommandKind::Steady => cmd_steady(cfg),
        CommandKind::Physical => cmd_physical(cfg),
        CommandKind::Figure => figures::reproduce(cfg.preset.expect("figure preset"), cfg),
    }
}

pub(crate) fn spectrum_json(r: &SpectrumResult) -> Value {
    json!({
        "M": r.count,
        "degenerate": r.degenerate,
        "band_edge": r.band_edge,
        "states": r.states,
    })
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<Report, Failure> {
    let r = find_bound_states(&cfg.params)?;
    let sweep_like = spectrum_sweep_row(cfg.params.omega0, &r);
    Ok(Report {
        results: spectrum_json(&r),
        files: vec![(
            "spectrum.csv".into(),
            format!("axis_value,M,E_plus,Z_plus,E_minus,Z_minus,degenerate\n{sweep_like}"),
        )],
        errors: vec![],
    })
}

fn spectrum_sweep_row(x: f64, r: &SpectrumResult) -> String {
    let pair = |s: Option<&crate::spectrum::BoundState>| match s {
        Some(s) => format!("{},{}", fmt_f64(s.energy), fmt_f64(s.residue)),
        None => ",".to_string(),
    };
    format!("{},{},{},{},{}\n", fmt_f64(x), r.count, pair(r.plus()), pair(r.minus()), r.degenerate)
}

/// Largest deviation of the numeric |c₂|² from the bound-state prediction
/// over `t ≥ t_from`.
pub(crate) fn tail_error(t: &Trajectory, spectrum: &SpectrumResult, t_from: f64) -> f64 {
    (0..t.len())
        .filter(|&k| t.times[k] >= t_from)
        .map(|k| {
            let (_, c2) = long_time_amplitude(spectrum, t.times[k]);
            (t.c2[k].norm_sqr() - c2.norm_sqr()).abs()
        })
        .fold(0.0, f64::max)
}

/// Bound-state markers sampled every `every` time units.
pub(crate) fn markers_csv(spectrum: &SpectrumResult, omega0: f64, t_end: f64, every: f64) -> String {
    let mut out = String::from("t,pop2,energy\n");
    let n = (t_end / every).floor() as usize;
    for k in 0..=n {
        let t = k as f64 * every;
        let (_, c2) = long_time_amplitude(spectrum, t);
        let p = c2.norm_sqr();
        out.push_str(&format!("{},{},{}\n", fmt_f64(t), fmt_f64(p), fmt_f64(omega0 * p)));
    }
    out
}

pub(crate) fn trajectory_report(t: &Trajectory, spectrum: &SpectrumResult) -> Result<(Value, String), Failure> {
    let series = ObservableSeries::from_trajectory(t)?;
    let t_end = *t.times.last().unwrap();
    let window_start = (0.75 * t_end).max(t_end - 100.0);
    let ext = series_extrema(&series, window_start, t_end)?;
    let last = series.len() - 1;
    let value = json!({
        "omega0": t.params.omega0,
        "spectrum": spectrum_json(spectrum),
        "final_energy": series.energy[last],
        "final_ergotropy": series.ergotropy[last],
        "tail_window": [window_start, t_end],
        "tail_extrema": ext,
        "tail_error_vs_bound_states": tail_error(t, spectrum, window_start),
    });
    Ok((value, trajectory_csv(t, &series)))
}

fn cmd_dynamics(cfg: &RunConfig) -> Result<Report, Failure> {
    let p = cfg.params;
    let grid = kernel_grid(&p, cfg.solver.dt, cfg.solver.steps())?;
    let traj = solve_volterra(&p, &cfg.solver, &grid)?;
    let spectrum = find_bound_states(&p)?;
    let (results, csv) = trajectory_report(&traj, &spectrum)?;
    Ok(Report {
        results,
        files: vec![
            ("trajectory.csv".into(), csv),
            ("markers.csv".into(), markers_csv(&spectrum, p.omega0, cfg.solver.t_end, 10.0)),
        ],
        errors: vec![],
    })
}

fn cmd_sweep(cfg: &RunConfig) -> Result<Report, Failure> {
    let s = cfg.sweep.expect("sweep spec");
    let sweep = spectrum_sweep(&cfg.params, s.axis, s.lo, s.hi, s.n, Execution::Parallel)?;
    let errors: Vec<Value> = sweep
        .failures()
        .into_iter()
        .map(|(x, e)| json!({ "axis_value": x, "error": e }))
        .collect();
    let counts: Vec<Value> = sweep
        .points
        .iter()
        .map(|p| json!({ "axis_value": p.value, "M": p.result.as_ref().ok().map(|r| r.count) }))
        .collect();
    Ok(Report {
        results: json!({ "axis": s.axis, "band_edge": sweep.band_edge, "counts": counts }),
        files: vec![("sweep.csv".into(), sweep.to_csv())],
        errors,
    })
}

/// Long-time extrema of energy and ergotropy implied by the bound states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub(crate) struct SteadyExtrema {
    pub count: usize,
    pub degenerate: bool,
    pub energy_min: f64,
    pub energy_max: f64,
    pub ergotropy_max: f64,
}

pub(crate) fn steady_extrema(spectrum: &SpectrumResult, omega0: f64) -> SteadyExtrema {
    let z = |s: Option<&crate::spectrum::BoundState>| s.map_or(0.0, |s| s.residue);
    let (zp, zm) = (z(spectrum.plus()), z(spectrum.minus()));
    let (lo, hi) = if spectrum.degenerate {
        ((zp - zm).powi(2), (zp - zm).powi(2))
    } else {
        ((zp - zm).powi(2), (zp + zm).powi(2))
    };
    SteadyExtrema {
        count: spectrum.count,
        degenerate: spectrum.degenerate,
        energy_min: omega0 * lo,
        energy_max: omega0 * hi,
        ergotropy_max: omega0 * (2.0 * hi - 1.0).max(0.0),
    }
}

pub(crate) fn steady_row(x: f64, e: &SteadyExtrema) -> String {
    format!(
        "{},{},{},{},{},{}\n",
        fmt_f64(x),
        e.count,
        e.degenerate,
        fmt_f64(e.energy_min),
        fmt_f64(e.energy_max),
        fmt_f64(e.ergotropy_max)
    )
}

pub(crate) const STEADY_HEADER: &str = "axis_value,M,degenerate,E_min,E_max,W_max\n";

fn cmd_steady(cfg: &RunConfig) -> Result<Report, Failure> {
    match cfg.sweep {
        None => {
            let r = find_bound_states(&cfg.params)?;
            let e = steady_extrema(&r, cfg.params.omega0);
            Ok(Report {
                results: json!({ "spectrum": spectrum_json(&r), "steady": e }),
                files: vec![(
                    "steady.csv".into(),
                    format!("{STEADY_HEADER}{}", steady_row(cfg.params.omega0, &e)),
                )],
                errors: vec![],
            })
        }
        Some(s) => {
            let sweep = spectrum_sweep(&cfg.params, s.axis, s.lo, s.hi, s.n, Execution::Parallel)?;
            let mut csv = String::from(STEADY_HEADER);
            let mut errors = vec![];
            let mut best: Option<(f64, f64)> = None;
            for p in &sweep.points {
                match &p.result {
                    Ok(r) => {
                        let w0 = s.axis.apply(cfg.params, p.value).omega0;
                        let e = steady_extrema(r, w0);
                        if best.map_or(true, |(_, w)| e.ergotropy_max > w) {
                            best = Some((p.value, e.ergotropy_max));
                        }
                        csv.push_str(&steady_row(p.value, &e));
                    }
                    Err(msg) => {
                        errors.push(json!({ "axis_value": p.value, "error": msg }));
                        csv.push_str(&format!("{},,,,,\n", fmt_f64(p.value)));
                    }
                }
            }
            Ok(Report {
                results: json!({ "axis": s.axis, "best_ergotropy": best.map(|(x, w)| json!({"axis_value": x, "W_max": w})) }),
                files: vec![("steady_sweep.csv".into(), csv)],
                errors,
            })
        }
    }
}

fn cmd_physical(cfg: &RunConfig) -> Result<Report, Failure> {
    let p = cfg.physical.clone().unwrap_or_default();
    let (a, b) = (p.a_um.unwrap_or(0.0) * 1e-6, p.b_um.unwrap_or(0.0) * 1e-6);
    let geom = PhysicalWaveguide {
        a,
        b,
        x0: p.x0_um.map_or(0.5 * a, |x| x * 1e-6),
        y0: p.y0_um.map_or(0.5 * b, |y| y * 1e-6),
        dz_dipole: p.dipole_debye.unwrap_or(1.0) * DEBYE,
        lambda0: p.lambda0_nm.unwrap_or(0.0) * 1e-9,
    };
    geom.validate()?;
    let ratio = geom.omega0_over_omega11();
    let gamma = match p.dipole_debye {
        Some(_) => Some(gamma11_from_physical(&geom)?),
        None => None,
    };
    let lambda11 = std::f64::consts::TAU * crate::model::SPEED_OF_LIGHT / geom.omega11();
    let mut csv = String::from("a_um,b_um,lambda0_nm,omega0_over_omega11,omega11_rad_s,lambda11_m,gamma11\n");
    csv.push_str(&format!(
        "{},{},{},{},{},{},{}\n",
        fmt_f64(a * 1e6),
        fmt_f64(b * 1e6),
        fmt_f64(geom.lambda0 * 1e9),
        fmt_f64(ratio),
        fmt_f64(geom.omega11()),
        fmt_f64(lambda11),
        gamma.map(fmt_f64).unwrap_or_default()
    ));
    Ok(Report {
        results: json!({
            "omega0_over_omega11": ratio,
            "omega11_rad_per_s": geom.omega11(),
            "lambda11_m": lambda11,
            "gamma11": gamma,
        }),
        files: vec![("physical.csv".into(), csv)],
        errors: vec![],
    })
}
