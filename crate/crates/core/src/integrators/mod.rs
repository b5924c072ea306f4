//! Time integrators for periodic KdV, `∂ₜu + ∂ₓ³u = (1/2)∂ₓ(u²)`.
//!
//! All schemes are written in the original variable `u`, so only the
//! step-size phases `e^{±τ∂ₓ³}` and `e^{±(τ/2)∂ₓ³}` are ever formed.

mod config;
mod evolve;
mod fixed_point;
pub mod oracle;
mod stepper;

use thiserror::Error;

use crate::spectral::SpectralError;

pub use config::{Direction, IntegratorConfig, ResidualNorm, StepReport};
pub use evolve::{evolve, step_count, EvolveError, StepInfo, Trajectory};
pub use oracle::{direct_fourier_explicit_step, direct_fourier_step};
pub use stepper::{
    explicit_resonance_step, symmetric_lawson_step, symplectic_resonance_step, Method, Stepper,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceCause {
    /// Update norm grew more than tenfold between sweeps.
    ResidualGrowth,
    IterationCap,
    NonFinite,
}

impl std::fmt::Display for DivergenceCause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DivergenceCause::ResidualGrowth => "residual growth",
            DivergenceCause::IterationCap => "iteration cap reached",
            DivergenceCause::NonFinite => "non-finite values",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StepError {
    #[error("fixed-point iteration diverged after {iterations} sweeps ({cause}, last update {residual:e})")]
    FixedPointDivergence {
        iterations: usize,
        residual: f64,
        cause: DivergenceCause,
    },
    #[error("direct Fourier oracle is limited to {limit} modes, got {modes}")]
    GridTooLarge { modes: usize, limit: usize },
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
