//! Units, system parameters, spectral density and the bridge to physical
//! waveguide geometry.
//!
//! Internally ω₁₁ = 1, c = 1 and ħ = 1. Frequencies and rates are therefore
//! measured in units of the (1,1) cutoff frequency, times in 1/ω₁₁ and lengths
//! in c/ω₁₁. The charger–battery separation is entered in units of the cutoff
//! wavelength λ₁₁ = 2πc/ω₁₁ and converted with [`SystemParams::kappa`].

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_8128e-12;
/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Dimensionless problem definition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Emitter transition frequency ω₀ in units of ω₁₁.
    pub omega0: f64,
    /// Radiation rate Γ₁₁ in units of ω₁₁.
    pub gamma11: f64,
    /// Longitudinal charger–battery separation in units of λ₁₁.
    pub delta_z: f64,
}

impl SystemParams {
    pub fn new(omega0: f64, gamma11: f64, delta_z: f64) -> Result<Self> {
        let p = Self {
            omega0,
            gamma11,
            delta_z,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters used throughout the figures: Γ₁₁ = 0.5 ω₁₁, Δz = 0.1 λ₁₁.
    pub fn reference(omega0: f64) -> Self {
        Self {
            omega0,
            gamma11: 0.5,
            delta_z: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(invalid("omega0", format!("must be positive, got {}", self.omega0)));
        }
        if !(self.gamma11.is_finite() && self.gamma11 > 0.0) {
            return Err(invalid("gamma11", format!("must be positive, got {}", self.gamma11)));
        }
        if !(self.delta_z.is_finite() && self.delta_z >= 0.0) {
            return Err(invalid("delta_z", format!("must be non-negative, got {}", self.delta_z)));
        }
        Ok(())
    }

    /// Separation in internal length units, κ = ω₁₁Δz/c = 2π·(Δz/λ₁₁).
    pub fn kappa(&self) -> f64 {
        TAU * self.delta_z
    }

    /// Prefactor Γ₁₁/2π of the spectral density.
    pub(crate) fn density_scale(&self) -> f64 {
        self.gamma11 / TAU
    }

    pub fn with_omega0(self, omega0: f64) -> Self {
        Self { omega0, ..self }
    }

    pub fn with_delta_z(self, delta_z: f64) -> Self {
        Self { delta_z, ..self }
    }

    pub fn with_gamma11(self, gamma11: f64) -> Self {
        Self { gamma11, ..self }
    }
}

/// Selects the self (J₀) or cross (J₁) spectral density, `|j - j'|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpectralBranch {
    SelfCoupling,
    Cross,
}

impl SpectralBranch {
    pub fn from_index(p: u8) -> Result<Self> {
        match p {
            0 => Ok(Self::SelfCoupling),
            1 => Ok(Self::Cross),
            _ => Err(invalid("p", format!("branch index must be 0 or 1, got {p}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Self::SelfCoupling => 0,
            Self::Cross => 1,
        }
    }

    /// Retardation wavenumber multiplying the longitudinal wavenumber in the
    /// cosine factor: 0 for the self term, κ for the cross term.
    pub(crate) fn phase_rate(self, params: &SystemParams) -> f64 {
        match self {
            Self::SelfCoupling => 0.0,
            Self::Cross => params.kappa(),
        }
    }
}

/// Spectral density `J_p(ω)` of the (1,1) mode for z-polarised emitters.
///
/// Zero at and below the cutoff. The square-root divergence just above the
/// cutoff is integrable; integrators go through the substitution
/// ω = cosh θ (or k = sinh θ) rather than sampling it.
pub fn spectral_density(p: SpectralBranch, omega: f64, params: &SystemParams) -> f64 {
    if omega <= 1.0 {
        return 0.0;
    }
    let k = ((omega - 1.0) * (omega + 1.0)).sqrt();
    params.density_scale() * (p.phase_rate(params) * k).cos() / k
}

/// Physical geometry of the waveguide and the emitters (SI units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalWaveguide {
    /// Transverse side along x (m).
    pub a: f64,
    /// Transverse side along y (m).
    pub b: f64,
    /// Common transverse emitter position (m).
    pub x0: f64,
    pub y0: f64,
    /// Dipole moment magnitude along z (C·m).
    pub dz_dipole: f64,
    /// Emitter transition wavelength (m).
    pub lambda0: f64,
}

impl PhysicalWaveguide {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("lambda0", self.lambda0), ("dz_dipole", self.dz_dipole)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.x0 > 0.0 && self.x0 < self.a) {
            return Err(invalid("x0", format!("must lie inside (0, a = {}), got {}", self.a, self.x0)));
        }
        if !(self.y0 > 0.0 && self.y0 < self.b) {
            return Err(invalid("y0", format!("must lie inside (0, b = {}), got {}", self.b, self.y0)));
        }
        Ok(())
    }

    /// Cutoff of the (1,1) mode (rad/s).
    pub fn omega11(&self) -> f64 {
        cutoff_frequency(self.a, self.b, 1, 1)
    }

    /// Emitter frequency 2πc/λ₀ (rad/s).
    pub fn omega0(&self) -> f64 {
        TAU * SPEED_OF_LIGHT / self.lambda0
    }

    /// ω₀/ω₁₁ for this geometry.
    pub fn omega0_over_omega11(&self) -> f64 {
        self.omega0() / self.omega11()
    }
}

/// Cutoff frequency `ω_mn = c [(mπ/a)² + (nπ/b)²]^{1/2}` (rad/s).
pub fn cutoff_frequency(a: f64, b: f64, m: u32, n: u32) -> f64 {
    let kx = m as f64 * PI / a;
    let ky = n as f64 * PI / b;
    SPEED_OF_LIGHT * kx.hypot(ky)
}

/// Radiation rate Γ₁₁ of an emitter into the (1,1) mode, in units of ω₁₁.
pub fn gamma11_from_physical(geom: &PhysicalWaveguide) -> Result<f64> {
    geom.validate()?;
    let w11 = geom.omega11();
    let sx = (PI * geom.x0 / geom.a).sin();
    let sy = (PI * geom.y0 / geom.b).sin();
    let rate = 4.0 * w11 * geom.dz_dipole.powi(2) / (VACUUM_PERMITTIVITY * geom.a * geom.b * SPEED_OF_LIGHT)
        * sx.powi(2)
        * sy.powi(2);
    // The expression is an energy (ħ = 1 in the model); divide by ħ for a rate.
    Ok(rate / HBAR / w11)
}
