//! Literal double-sum evaluation of the resonance-based schemes in the
//! twisted variable. Cost is `O(M²)` per sweep, so these are verification
//! oracles only and refuse grids larger than [`ORACLE_MAX_MODES`].

use num_complex::Complex64;

use super::fixed_point::{self, FixedPointMap};
use super::{IntegratorConfig, StepError};
use crate::spectral::{free_flow_multipliers, l2_norm, GridSpec, SpectralState};

pub const ORACLE_MAX_MODES: usize = 128;

/// Resonance kernel `-(e^{-iτΩ} - 1) / (24ab)` with `Ω = m³ - a³ - b³`.
///
/// For an unwrapped triple (`m = a + b`) the phase is evaluated as
/// `3mab`. Wrapped triples (`a + b = m ± M`) keep the collocation phase
/// `m³ - a³ - b³`.
pub fn resonance_kernel(m: i64, a: i64, b: i64, tau: f64) -> Complex64 {
    let omega = if a + b == m {
        (3 * m * a * b) as f64
    } else {
        (m * m * m - a * a * a - b * b * b) as f64
    };
    let (s, c) = (tau * omega).sin_cos();
    let phase_minus_one = Complex64::new(c - 1.0, -s);
    -phase_minus_one / (24.0 * (a * b) as f64)
}

struct Triple {
    out: usize,
    a: usize,
    b: usize,
    kernel: Complex64,
}

/// All `(m, a, b)` with `a, b` active and `a + b ≡ m (mod M)` active.
fn triples(grid: GridSpec, tau: f64) -> Vec<Triple> {
    let mut out = Vec::new();
    for (ka, a) in grid.active_modes() {
        for (kb, b) in grid.active_modes() {
            let m = grid.wrap(a + b);
            if m == 0 || m == grid.nyquist() {
                continue;
            }
            out.push(Triple {
                out: grid.slot_of(m).expect("wrapped mode is in range"),
                a: ka,
                b: kb,
                kernel: resonance_kernel(m, a, b, tau),
            });
        }
    }
    out
}

struct DirectMap<'a> {
    prev: &'a [Complex64],
    triples: &'a [Triple],
    sum: Vec<Complex64>,
}

impl FixedPointMap for DirectMap<'_> {
    fn apply(&mut self, guess: &[Complex64], out: &mut [Complex64]) -> f64 {
        self.sum.fill(Complex64::new(0.0, 0.0));
        let mut scale = 0.0;
        for t in self.triples {
            let term = t.kernel
                * (guess[t.a] + self.prev[t.a])
                * (guess[t.b] + self.prev[t.b]);
            scale += term.norm();
            self.sum[t.out] += term;
        }
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.prev[k] + self.sum[k];
        }
        scale.max(l2_norm(&self.sum))
    }
}

fn check_grid(grid: GridSpec) -> Result<(), StepError> {
    if grid.modes() > ORACLE_MAX_MODES {
        return Err(StepError::GridTooLarge {
            modes: grid.modes(),
            limit: ORACLE_MAX_MODES,
        });
    }
    Ok(())
}

/// Solves the midpoint-averaged scheme
/// `v̂ₘⁿ⁺¹ = v̂ₘⁿ + Σ_{a+b≡m} K(m,a,b) (v̂ₐⁿ⁺¹ + v̂ₐⁿ)(v̂_bⁿ⁺¹ + v̂_bⁿ)`
/// by fixed-point iteration over explicit sums, with `tₙ = 0` so that
/// `vⁿ = uⁿ`, and returns `uⁿ⁺¹ = e^{-τ∂ₓ³} vⁿ⁺¹`.
pub fn direct_fourier_step(
    un: &SpectralState,
    cfg: &IntegratorConfig,
) -> Result<SpectralState, StepError> {
    cfg.validate()?;
    let grid = un.grid();
    check_grid(grid)?;
    let h = cfg.signed_step();
    let triples = triples(grid, h);
    let mut map = DirectMap {
        prev: un.coeffs(),
        triples: &triples,
        sum: vec![Complex64::new(0.0, 0.0); grid.modes()],
    };
    let mut v = un.coeffs().to_vec();
    fixed_point::solve(&mut map, grid, cfg, &mut v)?;
    let back = free_flow_multipliers(grid, -h);
    let coeffs = v.iter().zip(&back).map(|(c, w)| c * w).collect();
    Ok(SpectralState::from_coeffs_projected(grid, coeffs)?)
}

/// Frozen-amplitude analogue: both midpoint averages replaced by `v̂ⁿ`,
/// which turns the kernel prefactor into `-1/(6ab)`. No iteration needed.
pub fn direct_fourier_explicit_step(
    un: &SpectralState,
    cfg: &IntegratorConfig,
) -> Result<SpectralState, StepError> {
    cfg.validate()?;
    let grid = un.grid();
    check_grid(grid)?;
    let h = cfg.signed_step();
    let prev = un.coeffs();
    let mut v = prev.to_vec();
    for t in triples(grid, h) {
        // 4 * kernel turns -1/(24ab) into -1/(6ab).
        v[t.out] += t.kernel * 4.0 * prev[t.a] * prev[t.b];
    }
    let back = free_flow_multipliers(grid, -h);
    let coeffs = v.iter().zip(&back).map(|(c, w)| c * w).collect();
    Ok(SpectralState::from_coeffs_projected(grid, coeffs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_small_tau_limit() {
        let tau = 1e-6;
        let k = resonance_kernel(3, 1, 2, tau);
        let expected = Complex64::new(0.0, tau * 3.0 / 8.0);
        assert!((k - expected).norm() / expected.norm() < 1e-5);
    }

    #[test]
    fn wrapped_triples_use_collocation_phase() {
        // On M = 8, a = b = 3 wraps to m = -2.
        let g = GridSpec::new(8).unwrap();
        assert_eq!(g.wrap(6), -2);
        let tau = 0.3;
        let k = resonance_kernel(-2, 3, 3, tau);
        let omega = (-8 - 27 - 27) as f64;
        let expected = -(Complex64::new(0.0, -tau * omega).exp() - 1.0) / 216.0;
        assert!((k - expected).norm() < 1e-15);
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = GridSpec::new(16).unwrap();
        let cfg = IntegratorConfig::new(0.1).unwrap();
        let z = SpectralState::zeros(g);
        assert!(direct_fourier_step(&z, &cfg).unwrap().is_zero());
        assert!(direct_fourier_explicit_step(&z, &cfg).unwrap().is_zero());
    }

    #[test]
    fn refuses_large_grids() {
        let g = GridSpec::new(256).unwrap();
        let cfg = IntegratorConfig::new(0.1).unwrap();
        assert!(matches!(
            direct_fourier_step(&SpectralState::zeros(g), &cfg),
            Err(StepError::GridTooLarge { .. })
        ));
    }
}
