//! Fourier substrate shared by every integrator: the collocation grid,
//! the spectral state, transforms, diagonal operators, products and norms.

mod fft;
mod grid;
mod ops;
mod state;

use thiserror::Error;

pub(crate) use fft::Squarer;
pub use grid::GridSpec;
pub(crate) use ops::{antiderivative_symbols, l2_norm, sobolev_norm_coeffs};
pub use ops::{
    antiderivative, derivative, free_flow, free_flow_multipliers, pointwise_square,
    sobolev_norm, to_physical, to_physical_with_residue, to_spectral,
};
pub(crate) use state::project;
pub use state::{SobolevIndex, SpectralState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid must have an even number of modes >= 4, got {0}")]
    InvalidGrid(usize),
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("states live on different grids ({left} vs {right} modes)")]
    GridMismatch { left: usize, right: usize },
    #[error("spectral invariant violated: {0}")]
    InvariantViolation(String),
    #[error("Sobolev index must be a finite non-negative number, got {0}")]
    InvalidSobolevIndex(f64),
}

/// Unscaled inverse DFT of an arbitrary-length buffer.
pub(crate) fn inverse_dft(buf: &mut [num_complex::Complex64]) {
    fft::Dft::new(buf.len()).inverse(buf);
}
