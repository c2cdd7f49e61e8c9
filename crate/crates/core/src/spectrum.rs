//! Bound states below the cutoff.
//!
//! In the symmetric (+) and antisymmetric (−) sectors the pole equation is
//! `E = Y±(E)` with
//!
//! ```text
//! Y±(E) = ω₀ − ∫ [J₀(ω) ± J₁(ω)] / (ω − E) dω,      E < ω₁₁.
//! ```
//!
//! `Y±` decreases monotonically in `E`, so each sector has at most one root
//! below the band edge, and it exists exactly when `Y±(ω₁₁⁻) < ω₁₁`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::integrals::resolvent;
use crate::model::{SpectralBranch, SystemParams};
use crate::par::{self, Execution};

/// Distance below the band edge at which existence is tested.
pub const EDGE_GUARD: f64 = 1e-6;
/// Two bound states closer than this are reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-6;
/// Bisection stops once the bracket is narrower than this.
pub const ROOT_TOL: f64 = 1e-12;

/// Symmetric (+) or antisymmetric (−) sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

/// `∫ [J₀ ± J₁] / (ω − E)^power dω`. The two terms cancel exactly for
/// coincident emitters in the − sector.
fn branch_integral(branch: Branch, e: f64, params: &SystemParams, power: i32) -> f64 {
    let s = resolvent(SpectralBranch::SelfCoupling, params, e, power);
    if params.delta_z == 0.0 {
        return match branch {
            Branch::Plus => 2.0 * s,
            Branch::Minus => 0.0,
        };
    }
    let c = resolvent(SpectralBranch::Cross, params, e, power);
    s + branch.sign() * c
}

/// `Y±(E)` for `E < 1`.
pub fn y_function(branch: Branch, e: f64, params: &SystemParams) -> Result<f64> {
    params.validate()?;
    if !(e < 1.0) {
        return Err(Error::AboveCutoff(e));
    }
    Ok(params.omega0 - branch_integral(branch, e, params, 1))
}

/// One isolated root of `Y±(E) = E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub branch: Branch,
    pub energy: f64,
    pub residue: f64,
    /// Charger/battery amplitude ratio α₂/α₁ of the eigenvector.
    pub parity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub count: usize,
    /// `+` first when both exist.
    pub states: Vec<BoundState>,
    pub band_edge: f64,
    pub degenerate: bool,
}

impl SpectrumResult {
    pub fn get(&self, branch: Branch) -> Option<&BoundState> {
        self.states.iter().find(|s| s.branch == branch)
    }

    pub fn plus(&self) -> Option<&BoundState> {
        self.get(Branch::Plus)
    }

    pub fn minus(&self) -> Option<&BoundState> {
        self.get(Branch::Minus)
    }
}

/// Whether the branch has a root below the band edge.
pub fn branch_exists(branch: Branch, params: &SystemParams) -> Result<bool> {
    let e = 1.0 - EDGE_GUARD;
    Ok(y_function(branch, e, params)? < e)
}

/// Locate the root of `Y(E) − E` for one branch by bisection.
pub fn solve_branch(branch: Branch, params: &SystemParams) -> Result<Option<f64>> {
    let hi = 1.0 - EDGE_GUARD;
    let f = |e: f64| y_function(branch, e, params).map(|y| y - e);
    if f(hi)? >= 0.0 {
        return Ok(None);
    }
    let mut lo = (params.omega0 - 10.0 * params.gamma11).max(-10.0).min(hi - 1e-3);
    let mut extensions = 0;
    while f(lo)? <= 0.0 {
        extensions += 1;
        if extensions > 60 {
            return Err(Error::Bracketing {
                branch: branch.symbol(),
                reason: format!("no sign change down to E = {lo:e}"),
            });
        }
        lo = 1.0 - 2.0 * (1.0 - lo);
    }
    let mut hi = hi;
    let mut iterations = 0;
    while hi - lo > ROOT_TOL {
        iterations += 1;
        if iterations > 200 {
            return Err(Error::NoConvergence {
                iterations,
                width: hi - lo,
            });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// `Z± = ½ [1 + ∫ (J₀ ± J₁)/(ω − E)² dω]⁻¹`.
pub fn residue(branch: Branch, energy: f64, params: &SystemParams) -> Result<f64> {
    params.validate()?;
    if !(energy < 1.0) {
        return Err(Error::AboveCutoff(energy));
    }
    Ok(0.5 / (1.0 + branch_integral(branch, energy, params, 2)))
}

/// Amplitude ratio α₂/α₁ from the first row of the eigenvalue problem,
/// `(E − ω₀ + S)α₁ + C α₂ = 0` with `S`, `C` the self and cross resolvents.
pub fn amplitude_ratio(energy: f64, params: &SystemParams) -> f64 {
    let s = resolvent(SpectralBranch::SelfCoupling, params, energy, 1);
    let c = if params.delta_z == 0.0 {
        s
    } else {
        resolvent(SpectralBranch::Cross, params, energy, 1)
    };
    -(energy - params.omega0 + s) / c
}

pub fn find_bound_states(params: &SystemParams) -> Result<SpectrumResult> {
    params.validate()?;
    let mut states = Vec::with_capacity(2);
    for branch in [Branch::Plus, Branch::Minus] {
        if let Some(energy) = solve_branch(branch, params)? {
            states.push(BoundState {
                branch,
                energy,
                residue: residue(branch, energy, params)?,
                parity: amplitude_ratio(energy, params),
            });
        }
    }
    let degenerate = states.len() == 2 && (states[0].energy - states[1].energy).abs() < DEGENERACY_TOL;
    Ok(SpectrumResult {
        count: states.len(),
        states,
        band_edge: 1.0,
        degenerate,
    })
}

/// Parameter swept by [`spectrum_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Omega0,
    DeltaZ,
    Gamma11,
}

impl SweepAxis {
    pub fn apply(self, base: SystemParams, value: f64) -> SystemParams {
        match self {
            SweepAxis::Omega0 => base.with_omega0(value),
            SweepAxis::DeltaZ => base.with_delta_z(value),
            SweepAxis::Gamma11 => base.with_gamma11(value),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Omega0 => "omega0",
            SweepAxis::DeltaZ => "delta_z",
            SweepAxis::Gamma11 => "gamma11",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega0" => Ok(SweepAxis::Omega0),
            "delta_z" | "dz" => Ok(SweepAxis::DeltaZ),
            "gamma11" => Ok(SweepAxis::Gamma11),
            other => Err(invalid("axis", format!("unknown sweep axis `{other}`"))),
        }
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive. Each point is formed
/// as a weighted mean of the ends so that round grid values come out exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let d = (n - 1) as f64;
    (0..n)
        .map(|i| (lo * (d - i as f64) + hi * i as f64) / d)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub result: std::result::Result<SpectrumResult, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSweep {
    pub axis: SweepAxis,
    pub base: SystemParams,
    pub band_edge: f64,
    pub points: Vec<SweepPoint>,
}

impl SpectrumSweep {
    pub fn failures(&self) -> Vec<(f64, &str)> {
        self.points
            .iter()
            .filter_map(|p| p.result.as_ref().err().map(|e| (p.value, e.as_str())))
            .collect()
    }

    /// CSV with columns `axis_value, M, E_plus, Z_plus, E_minus, Z_minus,
    /// degenerate`; absent states leave empty fields, failed points leave
    /// every field but the axis value empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis_value,M,E_plus,Z_plus,E_minus,Z_minus,degenerate\n");
        for p in &self.points {
            out.push_str(&fmt_f64(p.value));
            match &p.result {
                Ok(r) => {
                    let pair = |s: Option<&BoundState>| match s {
                        Some(s) => format!("{},{}", fmt_f64(s.energy), fmt_f64(s.residue)),
                        None => ",".to_string(),
                    };
                    out.push_str(&format!(",{},{},{},{}\n", r.count, pair(r.plus()), pair(r.minus()), r.degenerate));
                }
                Err(_) => out.push_str(",,,,,,\n"),
            }
        }
        out
    }
}

/// Format with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn spectrum_sweep(
    base: &SystemParams,
    axis: SweepAxis,
    lo: f64,
    hi: f64,
    n_points: usize,
    exec: Execution,
) -> Result<SpectrumSweep> {
    if n_points < 2 {
        return Err(invalid("n_points", format!("need at least 2 points, got {n_points}")));
    }
    let values = linspace(lo, hi, n_points);
    let points = par::map(exec, &values, |&value| SweepPoint {
        value,
        result: find_bound_states(&axis.apply(*base, value)).map_err(|e| e.to_string()),
    });
    Ok(SpectrumSweep {
        axis,
        base: *base,
        band_edge: 1.0,
        points,
    })
}
