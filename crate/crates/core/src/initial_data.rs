//! Initial conditions: seeded rough data with algebraically decaying Fourier
//! coefficients, and a smooth zero-mean profile.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{to_spectral, GridSpec, SpectralError, SpectralState};

/// Identifier of the generator behind [`random_rough`], recorded in
/// experiment metadata. Each coefficient draws `Re` then `Im`, both uniform
/// on `[-1, 1]`, from a ChaCha8 stream seeded with `seed_from_u64`.
pub const GENERATOR_ID: &str = "chacha8(rand_chacha 0.9, seed_from_u64); uniform f64 [-1,1] re,im per mode m=1..M/2-1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InitialDataError {
    #[error("decay exponent theta must exceed 1/2, got {0}")]
    InvalidTheta(f64),
    #[error("smooth profile needs at least 16 modes, got {0}")]
    TooFewModes(usize),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Parameters of the rough random data `û_m = m^{-θ} U_m / 10`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoughDataSpec {
    #[serde(rename = "M")]
    pub modes: usize,
    pub theta: f64,
    pub seed: u64,
}

impl RoughDataSpec {
    pub fn new(modes: usize, theta: f64, seed: u64) -> Result<Self, InitialDataError> {
        let spec = Self { modes, theta, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<GridSpec, InitialDataError> {
        if !(self.theta > 0.5 && self.theta.is_finite()) {
            return Err(InitialDataError::InvalidTheta(self.theta));
        }
        Ok(GridSpec::new(self.modes)?)
    }
}

/// Random field with `û_m = m^{-θ} (X_m + i Y_m) / 10` for `1 <= m < M/2`,
/// `X_m, Y_m ~ U[-1, 1]`, mirrored by conjugation to negative modes. The mean
/// and Nyquist modes are zero.
pub fn random_rough(spec: &RoughDataSpec) -> Result<SpectralState, InitialDataError> {
    let grid = spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut modes = Vec::with_capacity(grid.modes() / 2);
    for m in 1..grid.nyquist() {
        let re: f64 = rng.random_range(-1.0..=1.0);
        let im: f64 = rng.random_range(-1.0..=1.0);
        let weight = (m as f64).powf(-spec.theta) / 10.0;
        modes.push((m, Complex64::new(re, im) * weight));
    }
    Ok(SpectralState::from_modes(grid, &modes)?)
}

/// Exact mean of `1/(10(2 + sin x))` over the torus, `1/(10√3)`.
pub fn smooth_profile_mean() -> f64 {
    1.0 / (10.0 * 3f64.sqrt())
}

/// Samples `1/(10(2 + sin x)) - 1/(10√3)` on the collocation grid and
/// transforms to Fourier space.
pub fn smooth_profile(modes: usize) -> Result<SpectralState, InitialDataError> {
    if modes < 16 {
        return Err(InitialDataError::TooFewModes(modes));
    }
    let grid = GridSpec::new(modes)?;
    let c = smooth_profile_mean();
    let samples: Vec<f64> = grid
        .points()
        .iter()
        .map(|x| 1.0 / (10.0 * (2.0 + x.sin())) - c)
        .collect();
    Ok(to_spectral(grid, &samples)?)
}
