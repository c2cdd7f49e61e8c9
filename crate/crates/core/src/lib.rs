//! Two-emitter quantum battery charged through a rectangular waveguide.
//!
//! A qubit charger and a qubit battery couple to the continuum of the
//! fundamental TE mode of a rectangular waveguide. This crate computes the
//! non-Markovian memory kernels of that continuum, the bound states that
//! survive below the cutoff, the exact single-excitation dynamics and the
//! stored energy and ergotropy of the battery.

pub mod error;
pub mod quad;
pub mod special;
pub mod model;
pub mod integrals;
pub mod par;
pub mod kernels;
pub mod spectrum;
pub mod dynamics;
pub mod observables;
pub mod cli;

pub use error::{Error, Result};
pub use model::{SpectralBranch, SystemParams};
pub use par::Execution;
