use num_complex::Complex64;

use super::{DivergenceCause, IntegratorConfig, ResidualNorm, StepError};
use crate::spectral::{sobolev_norm_coeffs, GridSpec};

/// Update norms below `ROUNDOFF_FACTOR * ε * scale` are indistinguishable
/// from rounding noise in the nonlinear terms and count as converged.
const ROUNDOFF_FACTOR: f64 = 64.0;

/// Residual growth between consecutive sweeps that is treated as divergence.
const GROWTH_LIMIT: f64 = 10.0;

/// One application of a fixed-point map.
pub(crate) trait FixedPointMap {
    /// Writes the image of `guess` into `out` and returns the magnitude of the
    /// nonlinear terms that were summed, used to estimate rounding noise.
    fn apply(&mut self, guess: &[Complex64], out: &mut [Complex64]) -> f64;
}

#[derive(Debug)]
pub(crate) struct Solution {
    pub iterations: usize,
    pub residual: f64,
}

fn update_norm(grid: GridSpec, norm: ResidualNorm, a: &[Complex64], b: &[Complex64], buf: &mut [Complex64]) -> f64 {
    for ((d, x), y) in buf.iter_mut().zip(a).zip(b) {
        *d = x - y;
    }
    let s = match norm {
        ResidualNorm::L2 => 0.0,
        ResidualNorm::H1 => 1.0,
    };
    sobolev_norm_coeffs(grid, buf, s)
}

/// Iterates `map` starting from `guess` until the update norm drops below
/// `cfg.fp_tol` (or the rounding floor). On success `guess` holds the last
/// iterate.
pub(crate) fn solve<F: FixedPointMap>(
    map: &mut F,
    grid: GridSpec,
    cfg: &IntegratorConfig,
    guess: &mut Vec<Complex64>,
) -> Result<Solution, StepError> {
    let mut next = vec![Complex64::new(0.0, 0.0); guess.len()];
    let mut diff = next.clone();
    let mut prev_residual: Option<f64> = None;
    let noise_scale = ROUNDOFF_FACTOR * f64::EPSILON * (grid.modes() as f64).sqrt();

    for iteration in 1..=cfg.fp_max_iters {
        let scale = map.apply(guess, &mut next);
        let residual = update_norm(grid, cfg.residual_norm, &next, guess, &mut diff);
        std::mem::swap(guess, &mut next);

        if !residual.is_finite() {
            return Err(StepError::FixedPointDivergence {
                iterations: iteration,
                residual,
                cause: DivergenceCause::NonFinite,
            });
        }
        let floor = noise_scale * scale;
        if residual <= cfg.fp_tol || residual <= floor {
            return Ok(Solution {
                iterations: iteration,
                residual,
            });
        }
        if let Some(prev) = prev_residual {
            if residual > GROWTH_LIMIT * prev {
                return Err(StepError::FixedPointDivergence {
                    iterations: iteration,
                    residual,
                    cause: DivergenceCause::ResidualGrowth,
                });
            }
        }
        prev_residual = Some(residual);
    }
    Err(StepError::FixedPointDivergence {
        iterations: cfg.fp_max_iters,
        residual: prev_residual.unwrap_or(f64::NAN),
        cause: DivergenceCause::IterationCap,
    })
}
