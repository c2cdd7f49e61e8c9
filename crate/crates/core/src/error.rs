use thiserror::Error;

/// Errors raised by the model, the numerical kernels and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("memory kernel requires t > 0, got t = {0}")]
    NonPositiveTime(f64),

    #[error("memory kernel is singular at t = {0} (light cone of the cross kernel)")]
    KernelSingular(f64),

    #[error("transition frequency sits exactly on the waveguide cutoff; the Lamb shift diverges there")]
    AtCutoff,

    #[error("energy E = {0} is not below the cutoff")]
    AboveCutoff(f64),

    #[error("root bracketing failed for branch {branch}: {reason}")]
    Bracketing { branch: char, reason: String },

    #[error("bisection did not converge after {iterations} iterations (bracket width {width:e})")]
    NoConvergence { iterations: usize, width: f64 },

    #[error("fixed-point corrector did not converge at step {step} (residual {residual:e})")]
    CorrectorDiverged { step: usize, residual: f64 },

    #[error("norm bound violated at t = {t}: |c1|^2 + |c2|^2 = {norm}")]
    NormViolation { t: f64, norm: f64 },

    #[error("kernel grid mismatch: {0}")]
    GridMismatch(String),

    #[error("empty window [{0}, {1}]")]
    EmptyWindow(f64, f64),

    #[error("excited population {0} exceeds 1 beyond tolerance")]
    PopulationOutOfRange(f64),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed kernel cache: {0}")]
    Cache(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
