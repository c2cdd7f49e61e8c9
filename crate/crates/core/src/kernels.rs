//! Memory kernels `f_p(t) = ∫ J_p(ω) e^{-iωt} dω`, their product-integration
//! moments on a uniform grid, Lamb shifts and Markovian rates.
//!
//! With `ω = cosh θ` the kernels become Hankel/Macdonald functions:
//!
//! ```text
//! f₀(t) = -i (Γ₁₁/4) H₀⁽²⁾(t)
//! f₁(t) = -i (Γ₁₁/4) H₀⁽²⁾(√(t² - κ²))      t > κ
//! f₁(t) =  (Γ₁₁/2π) K₀(√(κ² - t²))           t < κ
//! ```
//!
//! Both have a logarithmic singularity at `t = 0`; `f₁` has a second one on
//! the light cone `t = κ`. The closed forms are checked against an
//! ε-damped quadrature of the defining integral in the test suite.

use std::f64::consts::PI;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals;
use crate::model::{spectral_density, SpectralBranch, SystemParams};
use crate::par::{self, Execution};
use crate::quad::{gl8, tanh_sinh, Pair};
use crate::special::{bessel_k0, hankel2_0};

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

/// Closed-form memory kernel `f_p(t)` for `t > 0`.
pub fn memory_kernel(p: SpectralBranch, t: f64, params: &SystemParams) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let kappa = p.phase_rate(params);
    kernel_with_offset(params.gamma11, kappa, t, t - kappa)
}

/// Kernel evaluation with the light-cone offset `t - κ` supplied separately,
/// so that points very close to the light cone keep full relative accuracy.
fn kernel_with_offset(gamma: f64, kappa: f64, t: f64, offset: f64) -> Result<Complex64> {
    if kappa == 0.0 {
        return Ok(MINUS_I * (0.25 * gamma) * hankel2_0(t));
    }
    if offset > 0.0 {
        let x = (offset * (t + kappa)).sqrt();
        Ok(MINUS_I * (0.25 * gamma) * hankel2_0(x))
    } else if offset < 0.0 {
        let y = (-offset * (t + kappa)).sqrt();
        Ok(Complex64::new(gamma / (2.0 * PI) * bessel_k0(y), 0.0))
    } else {
        Err(Error::KernelSingular(t))
    }
}

/// Product-integration moments of a kernel over one lag cell
/// `[j·dt, (j+1)·dt]`: `lead = ∫ f(s)(1-u) ds`, `trail = ∫ f(s) u ds` with
/// `u = (s - j·dt)/dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellMoments {
    pub lead: Complex64,
    pub trail: Complex64,
}

/// Kernel samples and convolution weights on a uniform time grid.
///
/// Samples sit at half steps, `t_k = (k + ½)·dt`, so the log singularity at
/// `t = 0` is never evaluated. The solver works from the exact cell moments,
/// which integrate the singularities instead of sampling them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelGrid {
    pub dt: f64,
    pub n: usize,
    pub gamma11: f64,
    pub delta_z: f64,
    pub f0: Vec<Complex64>,
    pub f1: Vec<Complex64>,
    pub m0: Vec<CellMoments>,
    pub m1: Vec<CellMoments>,
}

impl KernelGrid {
    /// Sample time of index `k`.
    pub fn time(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.dt
    }

    /// Whether this grid was built for the given coupling and separation.
    pub fn matches(&self, params: &SystemParams) -> bool {
        self.gamma11 == params.gamma11 && self.delta_z == params.delta_z
    }

    /// Write the grid as a whitespace-separated text table with shortest
    /// round-trip float formatting.
    pub fn write_cache<W: Write>(&self, out: W) -> Result<()> {
        let mut w = BufWriter::new(out);
        writeln!(w, "# qbwg kernel grid v1")?;
        writeln!(w, "# dt {:e} n {} gamma11 {:e} delta_z {:e}", self.dt, self.n, self.gamma11, self.delta_z)?;
        writeln!(
            w,
            "# t re_f0 im_f0 re_f1 im_f1 re_a0 im_a0 re_b0 im_b0 re_a1 im_a1 re_b1 im_b1"
        )?;
        for k in 0..self.n {
            let (a0, a1) = (self.m0[k], self.m1[k]);
            writeln!(
                w,
                "{:e} {:e} {:e} {:e} {:e} {:e} {:e} {:e} {:e} {:e} {:e} {:e} {:e}",
                self.time(k),
                self.f0[k].re,
                self.f0[k].im,
                self.f1[k].re,
                self.f1[k].im,
                a0.lead.re,
                a0.lead.im,
                a0.trail.re,
                a0.trail.im,
                a1.lead.re,
                a1.lead.im,
                a1.trail.re,
                a1.trail.im
            )?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_cache<R: Read>(input: R) -> Result<Self> {
        let reader = BufReader::new(input);
        let mut lines = reader.lines();
        let bad = |m: &str| Error::Cache(m.to_string());
        let magic = lines.next().ok_or_else(|| bad("empty file"))??;
        if magic.trim() != "# qbwg kernel grid v1" {
            return Err(bad("missing header"));
        }
        let meta = lines.next().ok_or_else(|| bad("missing metadata"))??;
        let fields: Vec<&str> = meta.trim_start_matches('#').split_whitespace().collect();
        if fields.len() != 8 {
            return Err(bad("metadata line"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad("number"));
        let dt = num(fields[1])?;
        let n: usize = fields[3].parse().map_err(|_| bad("n"))?;
        let gamma11 = num(fields[5])?;
        let delta_z = num(fields[7])?;
        let mut grid = KernelGrid {
            dt,
            n,
            gamma11,
            delta_z,
            f0: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            m0: Vec::with_capacity(n),
            m1: Vec::with_capacity(n),
        };
        for line in lines {
            let line = line?;
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let v: Vec<f64> = line.split_whitespace().map(num).collect::<Result<_>>()?;
            if v.len() != 13 {
                return Err(bad("row width"));
            }
            let c = |i: usize| Complex64::new(v[i], v[i + 1]);
            grid.f0.push(c(1));
            grid.f1.push(c(3));
            grid.m0.push(CellMoments { lead: c(5), trail: c(7) });
            grid.m1.push(CellMoments { lead: c(9), trail: c(11) });
        }
        if grid.f0.len() != n {
            return Err(bad("row count"));
        }
        Ok(grid)
    }
}

/// Precompute kernel samples and moments for `n` lag cells of width `dt`.
pub fn kernel_grid(params: &SystemParams, dt: f64, n: usize) -> Result<KernelGrid> {
    kernel_grid_with(params, dt, n, Execution::default())
}

pub fn kernel_grid_with(params: &SystemParams, dt: f64, n: usize, exec: Execution) -> Result<KernelGrid> {
    params.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(crate::error::invalid("dt", format!("must be positive, got {dt}")));
    }
    if n < 2 {
        return Err(crate::error::invalid("n", format!("need at least 2 samples, got {n}")));
    }
    let rows = par::map_range(exec, n, |k| -> Result<_> {
        let t = (k as f64 + 0.5) * dt;
        let f0 = memory_kernel(SpectralBranch::SelfCoupling, t, params)?;
        let f1 = memory_kernel(SpectralBranch::Cross, t, params)?;
        let m0 = cell_moments(params.gamma11, 0.0, k, dt);
        let m1 = cell_moments(params.gamma11, params.kappa(), k, dt);
        Ok((f0, f1, m0, m1))
    });
    let mut grid = KernelGrid {
        dt,
        n,
        gamma11: params.gamma11,
        delta_z: params.delta_z,
        f0: Vec::with_capacity(n),
        f1: Vec::with_capacity(n),
        m0: Vec::with_capacity(n),
        m1: Vec::with_capacity(n),
    };
    for row in rows {
        let (f0, f1, m0, m1) = row?;
        grid.f0.push(f0);
        grid.f1.push(f1);
        grid.m0.push(m0);
        grid.m1.push(m1);
    }
    Ok(grid)
}

/// Moments of the kernel with light-cone position `kappa` over lag cell `j`.
fn cell_moments(gamma: f64, kappa: f64, j: usize, dt: f64) -> CellMoments {
    let s0 = j as f64 * dt;
    let s1 = s0 + dt;
    let weigh = |s: f64, f: Complex64| -> Pair {
        let u = (s - s0) / dt;
        Pair(f * (1.0 - u), f * u)
    };
    // Singular points: the origin and (for the cross kernel) the light cone.
    let near = |sigma: f64| sigma > s0 - dt && sigma < s1 + dt;
    let cone = kappa > 0.0 && near(kappa);
    let Pair(lead, trail) = if j == 0 || j == 1 || cone {
        let piece = |a: f64, b: f64| -> Pair {
            tanh_sinh(
                |s, d| {
                    // Offset from the light cone, exact when an endpoint sits on it.
                    let offset = if a == kappa && d > 0.0 {
                        d
                    } else if b == kappa && d < 0.0 {
                        d
                    } else {
                        s - kappa
                    };
                    let t = if a == 0.0 && d > 0.0 { d } else { s };
                    match kernel_with_offset(gamma, kappa, t, offset) {
                        Ok(f) => weigh(s, f),
                        Err(_) => Pair(Complex64::zero(), Complex64::zero()),
                    }
                },
                a,
                b,
                1e-14,
            )
        };
        if kappa > s0 && kappa < s1 {
            piece(s0, kappa) + piece(kappa, s1)
        } else {
            piece(s0, s1)
        }
    } else {
        gl8().integrate(
            |s| weigh(s, kernel_with_offset(gamma, kappa, s, s - kappa).unwrap_or_default()),
            s0,
            s1,
        )
    };
    CellMoments { lead, trail }
}

/// Lamb shift `δ_p = 𝒫∫ J_p(ω)/(ω₀ - ω) dω`.
pub fn lamb_shift(p: SpectralBranch, omega0: f64, params: &SystemParams) -> Result<f64> {
    if !(omega0 > 0.0) {
        return Err(crate::error::invalid("omega0", format!("must be positive, got {omega0}")));
    }
    if omega0 == 1.0 {
        return Err(Error::AtCutoff);
    }
    if omega0 < 1.0 {
        Ok(-integrals::resolvent(p, params, omega0, 1))
    } else {
        Ok(integrals::principal_value(p, params, omega0))
    }
}

/// Complex Markovian rates `Υ_p = πJ_p(ω₀) + iδ_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovRates {
    pub upsilon0: Complex64,
    pub upsilon1: Complex64,
}

pub fn markov_rates(params: &SystemParams) -> Result<MarkovRates> {
    params.validate()?;
    let w0 = params.omega0;
    let rate = |p| -> Result<Complex64> {
        Ok(Complex64::new(PI * spectral_density(p, w0, params), lamb_shift(p, w0, params)?))
    };
    Ok(MarkovRates {
        upsilon0: rate(SpectralBranch::SelfCoupling)?,
        upsilon1: rate(SpectralBranch::Cross)?,
    })
}
