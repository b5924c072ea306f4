use serde::{Deserialize, Serialize};

use super::StepError;
use crate::spectral::SpectralState;

/// Norm used to measure fixed-point updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidualNorm {
    #[default]
    L2,
    H1,
}

/// Sign of the time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

/// Step size and fixed-point policy shared by all integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Step size, always positive; see [`Direction`] for backward runs.
    pub tau: f64,
    /// Stop once the norm of a fixed-point update drops below this.
    pub fp_tol: f64,
    pub fp_max_iters: usize,
    pub dealias: bool,
    pub residual_norm: ResidualNorm,
    pub direction: Direction,
}

impl IntegratorConfig {
    pub const DEFAULT_MAX_ITERS: usize = 100;

    /// Defaults: `fp_tol = tau^4`, 100 iterations, aliased products, L² updates.
    pub fn new(tau: f64) -> Result<Self, StepError> {
        let cfg = Self {
            tau,
            fp_tol: tau.powi(4),
            fp_max_iters: Self::DEFAULT_MAX_ITERS,
            dealias: false,
            residual_norm: ResidualNorm::L2,
            direction: Direction::Forward,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_fp_tol(mut self, tol: f64) -> Self {
        self.fp_tol = tol;
        self
    }

    pub fn with_max_iters(mut self, iters: usize) -> Self {
        self.fp_max_iters = iters;
        self
    }

    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn with_residual_norm(mut self, norm: ResidualNorm) -> Self {
        self.residual_norm = norm;
        self
    }

    /// Same configuration stepping backward in time.
    pub fn reversed(mut self) -> Self {
        self.direction = match self.direction {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        };
        self
    }

    /// Signed step `±tau`.
    #[inline]
    pub fn signed_step(&self) -> f64 {
        match self.direction {
            Direction::Forward => self.tau,
            Direction::Backward => -self.tau,
        }
    }

    pub fn validate(&self) -> Result<(), StepError> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(StepError::InvalidConfig(format!(
                "tau must be positive and finite, got {}",
                self.tau
            )));
        }
        if !(self.fp_tol > 0.0 && self.fp_tol.is_finite()) {
            return Err(StepError::InvalidConfig(format!(
                "fp_tol must be positive and finite, got {}",
                self.fp_tol
            )));
        }
        if self.fp_max_iters == 0 {
            return Err(StepError::InvalidConfig("fp_max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub state: SpectralState,
    /// Fixed-point sweeps used; zero for explicit methods.
    pub fp_iterations: usize,
    /// Norm of the last fixed-point update.
    pub fp_residual: f64,
}
