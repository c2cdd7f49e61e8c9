//! Frequency integrals of the spectral density against rational weights.
//!
//! All integrals over `[ω₁₁, ∞)` go through one of two substitutions:
//!
//! * the self density uses `ω = cosh θ`, so `J₀(ω) dω = (Γ₁₁/2π) dθ` and the
//!   integrand decays like `e^{-θ}`;
//! * the cross density uses the longitudinal wavenumber `k = sinh θ`, so
//!   `J₁(ω) dω = (Γ₁₁/2π) cos(κk) dk / √(1+k²)`, a Fourier integral with a
//!   fixed frequency κ handled panel by panel plus an asymptotic tail.

use crate::model::{SpectralBranch, SystemParams};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::quad::{composite, cosine_integral, gl16, gl8, graded_breaks, pole_breaks};

/// Upper θ limit for the self-density integrals; `e^{-40}` is far below f64
/// resolution of the results.
const THETA_MAX: f64 = 40.0;

/// Width of the near-edge peak of `1/(ω - E)` in θ or k.
fn edge_peak(e: f64) -> f64 {
    (2.0 * (1.0 - e)).max(0.0).sqrt()
}

/// `∫ J_p(ω) / (ω - E)^power dω` for `E < 1` and `power ∈ {1, 2}`.
pub fn resolvent(p: SpectralBranch, params: &SystemParams, e: f64, power: i32) -> f64 {
    debug_assert!(e < 1.0);
    let kappa = p.phase_rate(params);
    let scale = params.density_scale();
    let peak = edge_peak(e);
    if kappa == 0.0 {
        let breaks = graded_breaks(peak, 0.0, THETA_MAX);
        scale * composite(gl8(), |th: f64| (th.cosh() - e).powi(-power), &breaks)
    } else {
        let g = move |k: f64| {
            let w = k.hypot(1.0);
            1.0 / (w * (w - e).powi(power))
        };
        scale * cosine_integral(g, kappa, 0.0, peak)
    }
}

/// Cauchy principal value `𝒫∫ J_p(ω) / (ω₀ - ω) dω` for `ω₀ > 1`, by
/// subtracting the simple pole over a symmetric window.
pub fn principal_value(p: SpectralBranch, params: &SystemParams, omega0: f64) -> f64 {
    debug_assert!(omega0 > 1.0);
    let kappa = p.phase_rate(params);
    let scale = params.density_scale();
    if kappa == 0.0 {
        let beta = omega0.acosh();
        let q = |th: f64| 1.0 / (omega0 - th.cosh());
        // residue of q at θ = β
        let r = -1.0 / beta.sinh();
        let w = (0.5 * beta).min(0.5);
        let (left, right) = pole_breaks(beta, w, 0.0, beta + THETA_MAX, 0.5 * beta.max(1.0));
        let window = gl16().integrate(|th| q(th) - r / (th - beta), beta - w, beta + w);
        scale * (composite(gl8(), q, &left) + window + composite(gl8(), q, &right))
    } else {
        let k0 = ((omega0 - 1.0) * (omega0 + 1.0)).sqrt();
        let g = move |k: f64| {
            let w = k.hypot(1.0);
            1.0 / (w * (omega0 - w))
        };
        let f = |k: f64| g(k) * (kappa * k).cos();
        let r = -(kappa * k0).cos() / k0;
        let half = (0.5 * k0).min(0.5).min(FRAC_PI_2 / kappa);
        let step = (PI / kappa).min(0.5);
        // hand over to the oscillatory tail a few window widths past the pole
        let handover = k0 + 8.0 * half.max(0.25);
        let (left, right) = pole_breaks(k0, half, 0.0, handover, step);
        let window = gl16().integrate(|k| f(k) - r / (k - k0), k0 - half, k0 + half);
        let near = composite(gl8(), f, &left) + window + composite(gl8(), f, &right);
        scale * (near + cosine_integral(g, kappa, handover, 1.0))
    }
}
