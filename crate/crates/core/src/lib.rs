//! Fourier pseudospectral solvers for the periodic Korteweg–de Vries equation
//!
//! ```text
//! ∂ₜu + ∂ₓ³u = (1/2)∂ₓ(u²),   x ∈ [-π, π),   ∫u dx = 0
//! ```
//!
//! The crate provides an implicit, symmetric and symplectic resonance-based
//! integrator together with two comparison schemes (an explicit first-order
//! resonance-based method and an implicit-midpoint Lawson method), the
//! diagnostics needed to check their convergence and conservation
//! properties, and declarative experiment drivers that write CSV tables.

pub mod diagnostics;
pub mod harness;
pub mod initial_data;
pub mod integrators;
pub mod spectral;

pub use diagnostics::{
    canonical_pairing, h_error, hamiltonian, momentum, symplectic_pairing, DiagnosticsRecord,
};
pub use initial_data::{random_rough, smooth_profile, RoughDataSpec, GENERATOR_ID};
pub use integrators::{
    direct_fourier_step, evolve, explicit_resonance_step, symmetric_lawson_step,
    symplectic_resonance_step, IntegratorConfig, Method, StepError, StepReport, Stepper,
};
pub use spectral::{GridSpec, SobolevIndex, SpectralError, SpectralState};

/// Crate version, recorded in experiment metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
