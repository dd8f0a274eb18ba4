//! Shortcut protocols that drive a thermal harmonic oscillator into a target
//! squeezed thermal state in finite time, together with the forward-simulation
//! oracles used to verify them.
//!
//! Units: ħ and m are carried by [`UnitSystem`] (default 1), frequencies are
//! measured against the reference trap frequency ω₀, and all Fock-space work is
//! done in the number basis of the ω₀ oscillator.

pub mod dynamics;
pub mod error;
pub mod fock_core;
pub mod raman_protocol;
pub mod squeezed_state;
pub mod trap_protocol;
pub mod units;

pub use error::{Error, Result};
pub use fock_core::{CMatrix, DensityMatrix, FockOperator, C64};
pub use squeezed_state::{FactorizedForm, GaussianMoments, SqueezeParams};
pub use trap_protocol::{Schedule, TrapControls};
pub use raman_protocol::{RamanControls, RamanLaserConfig, StateFlow};
pub use units::UnitSystem;

/// Tool version embedded in emitted artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
