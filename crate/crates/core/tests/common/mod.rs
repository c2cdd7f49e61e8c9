//! Independent reference computations used by the integration and
//! acceptance tests. Nothing here calls into the library's numerics.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

/// Gauss-Legendre rule on [-1, 1] by Newton iteration (kept separate from
/// the library's rule on purpose).
pub struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Rule {
    pub fn new(n: usize) -> Self {
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        for i in 0..n {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    let (mut q0, mut q1) = (1.0, z);
                    for k in 2..=n {
                        let q2 = ((2 * k - 1) as f64 * z * q1 - (k - 1) as f64 * q0) / k as f64;
                        q0 = q1;
                        q1 = q2;
                    }
                    let d = n as f64 * (z * q1 - q0) / (z * z - 1.0);
                    x[i] = z;
                    w[i] = 2.0 / ((1.0 - z * z) * d * d);
                    break;
                }
            }
        }
        Self { x, w }
    }

    pub fn panel<F: FnMut(f64) -> Complex64>(&self, f: &mut F, a: f64, b: f64) -> Complex64 {
        let (h, m) = (0.5 * (b - a), 0.5 * (a + b));
        self.x
            .iter()
            .zip(&self.w)
            .fold(Complex64::new(0.0, 0.0), |acc, (&x, &w)| acc + f(m + h * x) * (w * h))
    }

    pub fn real_panel<F: FnMut(f64) -> f64>(&self, f: &mut F, a: f64, b: f64) -> f64 {
        let (h, m) = (0.5 * (b - a), 0.5 * (a + b));
        self.x.iter().zip(&self.w).map(|(&x, &w)| f(m + h * x) * w * h).sum()
    }
}

/// `(Γ/2π) ∫ cos(κk) e^{-(ε + i s t)ω} dk/ω` over the longitudinal
/// wavenumber `k`, with `ω = √(1+k²)`, cut where the damping drops below
/// 1e-12. `s = ±1` selects `e^{∓iωt}`.
fn damped_kernel(gamma: f64, kappa: f64, t: f64, eps: f64, s: f64, rule: &Rule) -> Complex64 {
    let omega_max = 27.7 / eps;
    let k_max = (omega_max * omega_max - 1.0).sqrt();
    let period = TAU / (t + kappa);
    let width = period.min(0.5);
    let panels = (k_max / width).ceil() as usize;
    let rate = Complex64::new(eps, s * t);
    let mut f = |k: f64| {
        let w = k.hypot(1.0);
        (-rate * w).exp() * ((kappa * k).cos() / w)
    };
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..panels {
        let a = j as f64 * width;
        sum += rule.panel(&mut f, a, (a + width).min(k_max));
    }
    sum * (gamma / TAU)
}

/// Memory kernel `∫ J(ω) e^{∓iωt} dω` from the ε-damped integral,
/// extrapolated to ε → 0 over ε ∈ {1e-2, 5e-3, 2.5e-3, 1.25e-3}.
pub fn kernel_oracle_signed(gamma: f64, delta_z: f64, t: f64, sign: f64) -> Complex64 {
    let rule = Rule::new(16);
    let kappa = TAU * delta_z;
    let eps = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
    let v: Vec<Complex64> = eps.iter().map(|&e| damped_kernel(gamma, kappa, t, e, sign, &rule)).collect();
    richardson(&v, 2.0, 1, 1)
}

pub fn kernel_oracle(gamma: f64, delta_z: f64, t: f64) -> Complex64 {
    kernel_oracle_signed(gamma, delta_z, t, 1.0)
}

/// Richardson table for a sequence computed at step ratio `ratio`, with
/// error terms in powers `first, first + step, ...` of the step.
pub fn richardson(v: &[Complex64], ratio: f64, first: i32, step: i32) -> Complex64 {
    let mut t = v.to_vec();
    let mut power = first;
    for _ in 1..v.len() {
        let f = ratio.powi(power);
        t = t.windows(2).map(|w| (w[1] * f - w[0]) / (f - 1.0)).collect();
        power += step;
    }
    t[0]
}

/// Lamb shift `𝒫∫ J₀(ω)/(ω₀ − ω) dω` for ω₀ > 1 by symmetric excision of
/// `(ω₀ − η, ω₀ + η)`, extrapolated η → 0 (error is odd in η).
pub fn excision_lamb_shift(gamma: f64, omega0: f64) -> f64 {
    let rule = Rule::new(16);
    let etas = [2e-2, 1e-2, 5e-3];
    let v: Vec<Complex64> = etas
        .iter()
        .map(|&eta| Complex64::new(excised(gamma, omega0, eta, &rule), 0.0))
        .collect();
    richardson(&v, 2.0, 1, 2).re
}

fn excised(gamma: f64, w0: f64, eta: f64, rule: &Rule) -> f64 {
    let j = |w: f64| gamma / TAU / ((w - 1.0) * (w + 1.0)).sqrt();
    let split = 1.0 + 0.5 * (w0 - 1.0);
    let n = 400;
    // [1, split]: ω = 1 + u² removes the edge singularity.
    let umax = (split - 1.0).sqrt();
    let mut left_edge = |u: f64| {
        let w = 1.0 + u * u;
        gamma / TAU * 2.0 / (2.0 + u * u).sqrt() / (w0 - w)
    };
    let mut sum = 0.0;
    for i in 0..n {
        let (a, b) = (umax * i as f64 / n as f64, umax * (i + 1) as f64 / n as f64);
        sum += rule.real_panel(&mut left_edge, a, b);
    }
    // [split, ω₀ − η]: ω = ω₀ − η e^s, so dω/(ω₀ − ω) = −ds.
    let smax = ((w0 - split) / eta).ln();
    let mut left_pole = |s: f64| j(w0 - eta * s.exp());
    for i in 0..n {
        let (a, b) = (smax * i as f64 / n as f64, smax * (i + 1) as f64 / n as f64);
        sum += rule.real_panel(&mut left_pole, a, b);
    }
    // [ω₀ + η, W]: ω = ω₀ + η e^s, then the analytic tail beyond W.
    let big = 1e7;
    let smax = ((big - w0) / eta).ln();
    let mut right = |s: f64| -j(w0 + eta * s.exp());
    for i in 0..4 * n {
        let (a, b) = (smax * i as f64 / (4 * n) as f64, smax * (i + 1) as f64 / (4 * n) as f64);
        sum += rule.real_panel(&mut right, a, b);
    }
    sum - gamma / TAU / big
}

/// Reduced battery density matrix from an explicit state vector on
/// charger ⊗ battery ⊗ three single-excitation field modes, traced over the
/// charger and field. Basis index = charger·16 + battery·8 + modes.
pub fn brute_force_battery_state(c1: Complex64, c2: Complex64, d: [Complex64; 3]) -> [[Complex64; 2]; 2] {
    let mut psi = vec![Complex64::new(0.0, 0.0); 32];
    psi[16] = c1;
    psi[8] = c2;
    for (k, dk) in d.iter().enumerate() {
        psi[1 << k] = *dk;
    }
    let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
    for charger in 0..2 {
        for modes in 0..8 {
            for b in 0..2 {
                for bp in 0..2 {
                    let i = charger * 16 + b * 8 + modes;
                    let ip = charger * 16 + bp * 8 + modes;
                    rho[b][bp] += psi[i] * psi[ip].conj();
                }
            }
        }
    }
    rho
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Ergotropy `Tr(ρH) − Tr(ρ̃H)` with ρ̃ the passive state: eigenvalues of ρ
/// in decreasing order placed on the levels of H in increasing order.
pub fn passive_ergotropy(rho: &[Vec<f64>], levels: &[f64]) -> f64 {
    let n = levels.len();
    let energy: f64 = (0..n).map(|i| rho[i][i] * levels[i]).sum();
    let mut p = symmetric_eigenvalues(rho.to_vec());
    p.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut e = levels.to_vec();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let passive: f64 = p.iter().zip(&e).map(|(p, e)| p * e).sum();
    energy - passive
}

/// Angular frequency of the largest non-DC FFT peak of a uniformly sampled
/// real signal, and the bin width.
pub fn dominant_frequency(samples: &[f64], dt: f64) -> (f64, f64) {
    use rustfft::FftPlanner;
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<rustfft::num_complex::Complex<f64>> = samples
        .iter()
        .map(|&x| rustfft::num_complex::Complex::new(x - mean, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let (k, _) = buf[1..n / 2]
        .iter()
        .enumerate()
        .map(|(i, z)| (i + 1, z.norm()))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    let bin = TAU / (n as f64 * dt);
    (k as f64 * bin, bin)
}

/// Derivative of `f` at `x` by Richardson-extrapolated central differences,
/// step `h` and `h/2`.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}
