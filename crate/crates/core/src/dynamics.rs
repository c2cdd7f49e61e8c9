//! Single-excitation amplitude dynamics of charger (c₁) and battery (c₂):
//!
//! ```text
//! ċ_j + iω₀ c_j + Σ_{j'} ∫₀ᵗ f_{|j−j'|}(t−τ) c_{j'}(τ) dτ = 0,   c₁(0) = 1, c₂(0) = 0
//! ```
//!
//! The convolution uses product integration: amplitudes are linear between
//! grid points and the kernel is integrated exactly over each lag cell
//! through the moments stored in [`KernelGrid`]. Time stepping is the
//! trapezoidal rule, either solved directly (the step equation is linear) or
//! by fixed-point correction of an Adams-Bashforth predictor.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernels::{kernel_grid, KernelGrid, MarkovRates};
use crate::model::SystemParams;
use crate::spectrum::SpectrumResult;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Implicit trapezoid step solved exactly as a 2×2 linear system.
    TrapezoidProduct,
    /// Adams-Bashforth predictor with fixed-point trapezoid corrector.
    PredictorCorrector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub corrector_tol: f64,
    pub max_corrector_iters: usize,
    /// Allowed excess of |c₁|² + |c₂|² over one.
    pub norm_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            corrector_tol: 1e-12,
            max_corrector_iters: 5,
            norm_slack: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            t_end: 400.0,
            scheme: Scheme::TrapezoidProduct,
            tolerances: Tolerances::default(),
        }
    }
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            ..Self::default()
        }
    }

    pub fn with_scheme(self, scheme: Scheme) -> Self {
        Self { scheme, ..self }
    }

    /// Largest admissible step: both the carrier at ω₀ and the kernel
    /// oscillation at ω₁₁ must be resolved.
    pub fn max_dt(params: &SystemParams) -> f64 {
        0.05 * (1.0 / params.omega0).min(1.0)
    }

    pub fn validate(&self, params: &SystemParams) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        let max = Self::max_dt(params);
        if self.dt > max * (1.0 + 1e-12) {
            return Err(invalid("dt", format!("{} exceeds the resolution limit {max}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end", format!("must be positive, got {}", self.t_end)));
        }
        if self.tolerances.max_corrector_iters == 0 {
            return Err(invalid("max_corrector_iters", "must be at least 1"));
        }
        Ok(())
    }

    /// Number of time steps.
    pub fn steps(&self) -> usize {
        ((self.t_end / self.dt).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub c1: Vec<Complex64>,
    pub c2: Vec<Complex64>,
    pub params: SystemParams,
    pub scheme: Scheme,
    pub dt: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Convolution weights: `K_m = Σ_{i<m} w[i] c_{m−i} + tail[m−1] c₀`.
struct Weights {
    w: Vec<Complex64>,
    tail: Vec<Complex64>,
}

impl Weights {
    fn from_moments(m: &[crate::kernels::CellMoments], n: usize) -> Self {
        let mut w = Vec::with_capacity(n);
        w.push(m[0].lead);
        for i in 1..n {
            w.push(m[i].lead + m[i - 1].trail);
        }
        let tail = m[..n].iter().map(|c| c.trail).collect();
        Self { w, tail }
    }

    fn combine(a: &Self, b: &Self, sign: f64) -> Self {
        let mix = |x: &[Complex64], y: &[Complex64]| x.iter().zip(y).map(|(p, q)| p + q * sign).collect();
        Self {
            w: mix(&a.w, &b.w),
            tail: mix(&a.tail, &b.tail),
        }
    }
}

fn check_grid(params: &SystemParams, cfg: &SolverConfig, grid: &KernelGrid) -> Result<usize> {
    params.validate()?;
    cfg.validate(params)?;
    let n = cfg.steps();
    if !grid.matches(params) {
        return Err(Error::GridMismatch(format!(
            "grid built for gamma11={}, delta_z={}",
            grid.gamma11, grid.delta_z
        )));
    }
    if grid.dt != cfg.dt {
        return Err(Error::GridMismatch(format!("grid dt {} differs from solver dt {}", grid.dt, cfg.dt)));
    }
    if grid.n < n {
        return Err(Error::GridMismatch(format!("grid has {} cells, need {n}", grid.n)));
    }
    Ok(n)
}

/// Solve the coupled two-emitter system.
pub fn solve_volterra(params: &SystemParams, cfg: &SolverConfig, grid: &KernelGrid) -> Result<Trajectory> {
    let n = check_grid(params, cfg, grid)?;
    let h = cfg.dt;
    let w0 = Weights::from_moments(&grid.m0, n);
    let w1 = Weights::from_moments(&grid.m1, n);
    let (a, b) = (w0.w[0], w1.w[0]);
    let carrier = I * params.omega0;
    // Step matrix [[α, β], [β, α]] = I + (h/2)(iω₀ + A₀).
    let alpha = ONE + (carrier + a) * (0.5 * h);
    let beta = b * (0.5 * h);
    let det = alpha * alpha - beta * beta;

    let mut c1 = Vec::with_capacity(n + 1);
    let mut c2 = Vec::with_capacity(n + 1);
    c1.push(ONE);
    c2.push(ZERO);
    // Right-hand side g = −iω₀c − K at the previous two steps.
    let mut g_prev = [-carrier, ZERO];
    let mut g_prev2 = g_prev;
    for m in 1..=n {
        let (mut h1, mut h2) = (w0.tail[m - 1] * c1[0], w1.tail[m - 1] * c1[0]);
        for i in 1..m {
            let (x1, x2) = (c1[m - i], c2[m - i]);
            h1 += w0.w[i] * x1 + w1.w[i] * x2;
            h2 += w1.w[i] * x1 + w0.w[i] * x2;
        }
        let rhs = [
            c1[m - 1] + (g_prev[0] - h1) * (0.5 * h),
            c2[m - 1] + (g_prev[1] - h2) * (0.5 * h),
        ];
        let g = |x: [Complex64; 2]| {
            [
                -(carrier + a) * x[0] - b * x[1] - h1,
                -b * x[0] - (carrier + a) * x[1] - h2,
            ]
        };
        let next = match cfg.scheme {
            Scheme::TrapezoidProduct => [
                (alpha * rhs[0] - beta * rhs[1]) / det,
                (alpha * rhs[1] - beta * rhs[0]) / det,
            ],
            Scheme::PredictorCorrector => {
                let prev = [c1[m - 1], c2[m - 1]];
                let guess = if m == 1 {
                    [prev[0] + g_prev[0] * h, prev[1] + g_prev[1] * h]
                } else {
                    [
                        prev[0] + (g_prev[0] * 1.5 - g_prev2[0] * 0.5) * h,
                        prev[1] + (g_prev[1] * 1.5 - g_prev2[1] * 0.5) * h,
                    ]
                };
                let update = |x: [Complex64; 2]| {
                    let gx = g(x);
                    [
                        prev[0] + (g_prev[0] + gx[0]) * (0.5 * h),
                        prev[1] + (g_prev[1] + gx[1]) * (0.5 * h),
                    ]
                };
                correct(guess, update, m, &cfg.tolerances)?
            }
        };
        let norm = next[0].norm_sqr() + next[1].norm_sqr();
        if norm > 1.0 + cfg.tolerances.norm_slack {
            return Err(Error::NormViolation { t: m as f64 * h, norm });
        }
        g_prev2 = g_prev;
        g_prev = g(next);
        c1.push(next[0]);
        c2.push(next[1]);
    }
    Ok(Trajectory {
        times: (0..=n).map(|k| k as f64 * h).collect(),
        c1,
        c2,
        params: *params,
        scheme: cfg.scheme,
        dt: h,
    })
}

/// Fixed-point iteration `x ← update(x)`, switching to half-step relaxation
/// when the residual grows.
fn correct<T, F>(mut x: T, update: F, step: usize, tol: &Tolerances) -> Result<T>
where
    T: Copy + Magnitude,
    F: Fn(T) -> T,
{
    let mut relax = false;
    let mut last = f64::INFINITY;
    for _ in 0..tol.max_corrector_iters {
        let y = update(x);
        let residual = y.distance(&x);
        if residual > last {
            relax = true;
        }
        x = if relax { x.midpoint(&y) } else { y };
        if residual <= tol.corrector_tol {
            return Ok(x);
        }
        last = residual;
    }
    let residual = update(x).distance(&x);
    if residual <= tol.corrector_tol {
        Ok(x)
    } else {
        Err(Error::CorrectorDiverged { step, residual })
    }
}

trait Magnitude {
    fn distance(&self, other: &Self) -> f64;
    fn midpoint(&self, other: &Self) -> Self;
}

impl Magnitude for Complex64 {
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
    fn midpoint(&self, other: &Self) -> Self {
        (self + other) * 0.5
    }
}

impl Magnitude for [Complex64; 2] {
    fn distance(&self, other: &Self) -> f64 {
        (self[0] - other[0]).norm().max((self[1] - other[1]).norm())
    }
    fn midpoint(&self, other: &Self) -> Self {
        [(self[0] + other[0]) * 0.5, (self[1] + other[1]) * 0.5]
    }
}

/// Symmetric and antisymmetric amplitudes `c± = c₁ ± c₂`, each obeying a
/// scalar equation with kernel `f₀ ± f₁` and `c±(0) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarPair {
    pub times: Vec<f64>,
    pub plus: Vec<Complex64>,
    pub minus: Vec<Complex64>,
}

impl ScalarPair {
    /// `c₁ = (c₊ + c₋)/2`, `c₂ = (c₊ − c₋)/2`.
    pub fn reconstruct(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let c1 = self.plus.iter().zip(&self.minus).map(|(p, m)| (p + m) * 0.5).collect();
        let c2 = self.plus.iter().zip(&self.minus).map(|(p, m)| (p - m) * 0.5).collect();
        (c1, c2)
    }
}

pub fn solve_scalar_pm(params: &SystemParams, cfg: &SolverConfig, grid: &KernelGrid) -> Result<ScalarPair> {
    let n = check_grid(params, cfg, grid)?;
    let w0 = Weights::from_moments(&grid.m0, n);
    let w1 = Weights::from_moments(&grid.m1, n);
    let plus = solve_scalar(params.omega0, &Weights::combine(&w0, &w1, 1.0), cfg, n)?;
    let minus = solve_scalar(params.omega0, &Weights::combine(&w0, &w1, -1.0), cfg, n)?;
    Ok(ScalarPair {
        times: (0..=n).map(|k| k as f64 * cfg.dt).collect(),
        plus,
        minus,
    })
}

fn solve_scalar(omega0: f64, w: &Weights, cfg: &SolverConfig, n: usize) -> Result<Vec<Complex64>> {
    let h = cfg.dt;
    let carrier = I * omega0;
    let diag = carrier + w.w[0];
    let mut c = Vec::with_capacity(n + 1);
    c.push(ONE);
    let mut g_prev = -carrier;
    let mut g_prev2 = g_prev;
    for m in 1..=n {
        let mut hist = w.tail[m - 1] * c[0];
        for i in 1..m {
            hist += w.w[i] * c[m - i];
        }
        let prev = c[m - 1];
        let g = |x: Complex64| -diag * x - hist;
        let next = match cfg.scheme {
            Scheme::TrapezoidProduct => (prev + (g_prev - hist) * (0.5 * h)) / (ONE + diag * (0.5 * h)),
            Scheme::PredictorCorrector => {
                let guess = if m == 1 {
                    prev + g_prev * h
                } else {
                    prev + (g_prev * 1.5 - g_prev2 * 0.5) * h
                };
                correct(guess, |x| prev + (g_prev + g(x)) * (0.5 * h), m, &cfg.tolerances)?
            }
        };
        if next.norm_sqr() > 1.0 + cfg.tolerances.norm_slack {
            return Err(Error::NormViolation {
                t: m as f64 * h,
                norm: next.norm_sqr(),
            });
        }
        g_prev2 = g_prev;
        g_prev = g(next);
        c.push(next);
    }
    Ok(c)
}

/// Build the kernel grid and solve in one call.
pub fn simulate(params: &SystemParams, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate(params)?;
    let grid = kernel_grid(params, cfg.dt, cfg.steps())?;
    solve_volterra(params, cfg, &grid)
}

/// Markovian amplitudes
/// `c_j = e^{−(iω₀+Υ₀)t} [e^{−Υ₁t} − (−1)^j e^{Υ₁t}] / 2`.
pub fn markovian_solution(params: &SystemParams, rates: &MarkovRates, t: f64) -> (Complex64, Complex64) {
    let envelope = (-(I * params.omega0 + rates.upsilon0) * t).exp();
    let (down, up) = ((-rates.upsilon1 * t).exp(), (rates.upsilon1 * t).exp());
    (envelope * (down + up) * 0.5, envelope * (down - up) * 0.5)
}

/// Bound-state part of the amplitudes, which is all that survives at long
/// times: `c_j = Σ± (±)^{j+1} Z± e^{−iE± t}`.
pub fn long_time_amplitude(spectrum: &SpectrumResult, t: f64) -> (Complex64, Complex64) {
    if spectrum.degenerate {
        let (p, m) = (spectrum.plus().unwrap(), spectrum.minus().unwrap());
        let phase = (-I * (0.5 * (p.energy + m.energy) * t)).exp();
        return (phase * (p.residue + m.residue), phase * (p.residue - m.residue));
    }
    spectrum.states.iter().fold((ZERO, ZERO), |(c1, c2), s| {
        let term = (-I * (s.energy * t)).exp() * s.residue;
        (c1 + term, c2 + term * s.branch.sign())
    })
}

/// Long-time battery energy `ω₀|c₂(t)|²` written out per bound-state count.
pub fn steady_energy_formula(spectrum: &SpectrumResult, params: &SystemParams, t: f64) -> f64 {
    let w0 = params.omega0;
    match (spectrum.plus(), spectrum.minus()) {
        (Some(p), Some(m)) if spectrum.degenerate => w0 * (p.residue - m.residue).powi(2),
        (Some(p), Some(m)) => {
            let beat = ((p.energy - m.energy) * t).cos();
            w0 * (p.residue.powi(2) + m.residue.powi(2) - 2.0 * p.residue * m.residue * beat)
        }
        (Some(s), None) | (None, Some(s)) => w0 * s.residue.powi(2),
        (None, None) => 0.0,
    }
}
