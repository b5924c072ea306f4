use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GridSpec, SpectralError};

/// Tolerance for accepting externally supplied coefficients as invariant-satisfying.
pub(crate) const INVARIANT_TOL: f64 = 1e-14;

/// Fourier coefficients of a real, zero-mean periodic field.
///
/// Invariants, enforced by every constructor:
/// * the mean mode is exactly zero,
/// * the Nyquist mode `M/2` is exactly zero,
/// * `c[-m] == conj(c[m])` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    pub(crate) grid: GridSpec,
    pub(crate) coeffs: Vec<Complex64>,
}

impl SpectralState {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.modes()],
        }
    }

    /// Builds a state from a list of `(mode, amplitude)` pairs for positive or
    /// negative modes; the conjugate partner is filled in.
    pub fn from_modes(grid: GridSpec, modes: &[(i64, Complex64)]) -> Result<Self, SpectralError> {
        let mut state = Self::zeros(grid);
        for &(m, c) in modes {
            if m == 0 || m.abs() >= grid.nyquist() {
                return Err(SpectralError::InvariantViolation(format!(
                    "mode {m} cannot carry data on a grid of {} modes",
                    grid.modes()
                )));
            }
            let k = grid.slot_of(m).expect("checked range");
            let kc = grid.slot_of(-m).expect("checked range");
            state.coeffs[k] = c;
            state.coeffs[kc] = c.conj();
        }
        Ok(state)
    }

    /// Accepts an FFT-ordered coefficient vector that already satisfies the
    /// invariants up to `1e-14` (relative to its largest entry); the small
    /// residue is then removed exactly.
    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.modes() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.modes(),
                found: coeffs.len(),
            });
        }
        let scale = coeffs.iter().map(|c| c.norm()).fold(1.0_f64, f64::max);
        let tol = INVARIANT_TOL * scale;
        let m = grid.modes();
        let half = m / 2;
        if coeffs[0].norm() > tol {
            return Err(SpectralError::InvariantViolation(format!(
                "mean mode is {} (must vanish)",
                coeffs[0]
            )));
        }
        if coeffs[half].norm() > tol {
            return Err(SpectralError::InvariantViolation(format!(
                "Nyquist mode is {} (must vanish)",
                coeffs[half]
            )));
        }
        for k in 1..half {
            if (coeffs[k] - coeffs[m - k].conj()).norm() > tol {
                return Err(SpectralError::InvariantViolation(format!(
                    "mode {k} is not the conjugate of mode -{k}"
                )));
            }
        }
        Self::from_coeffs_projected(grid, coeffs)
    }

    /// Projects an arbitrary FFT-ordered vector onto the invariant subspace:
    /// removes the mean, zeroes the Nyquist mode, and symmetrizes.
    pub fn from_coeffs_projected(
        grid: GridSpec,
        mut coeffs: Vec<Complex64>,
    ) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.modes() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.modes(),
                found: coeffs.len(),
            });
        }
        project(&mut coeffs);
        Ok(Self { grid, coeffs })
    }

    #[inline]
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Coefficients in FFT order.
    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Amplitude of `mode`; zero outside the index set.
    pub fn coeff(&self, mode: i64) -> Complex64 {
        self.grid
            .slot_of(mode)
            .map(|k| self.coeffs[k])
            .unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub(crate) fn ensure_same_grid(&self, other: &Self) -> Result<(), SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch {
                left: self.grid.modes(),
                right: other.grid.modes(),
            });
        }
        Ok(())
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SpectralError> {
        self.ensure_same_grid(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SpectralError> {
        self.ensure_same_grid(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

/// Removes the mean, zeroes the Nyquist mode and enforces Hermitian symmetry.
pub(crate) fn project(coeffs: &mut [Complex64]) {
    let m = coeffs.len();
    let half = m / 2;
    coeffs[0] = Complex64::new(0.0, 0.0);
    coeffs[half] = Complex64::new(0.0, 0.0);
    for k in 1..half {
        let avg = (coeffs[k] + coeffs[m - k].conj()) * 0.5;
        coeffs[k] = avg;
        coeffs[m - k] = avg.conj();
    }
}

impl Add for &SpectralState {
    type Output = SpectralState;

    /// Panics on grid mismatch; use [`SpectralState::checked_add`] otherwise.
    fn add(self, rhs: Self) -> SpectralState {
        self.checked_add(rhs).expect("grid mismatch in state addition")
    }
}

impl Sub for &SpectralState {
    type Output = SpectralState;

    /// Panics on grid mismatch; use [`SpectralState::checked_sub`] otherwise.
    fn sub(self, rhs: Self) -> SpectralState {
        self.checked_sub(rhs).expect("grid mismatch in state subtraction")
    }
}

impl Mul<f64> for &SpectralState {
    type Output = SpectralState;

    fn mul(self, rhs: f64) -> SpectralState {
        self.scaled(rhs)
    }
}

/// Sobolev regularity exponent `s >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SobolevIndex(f64);

impl SobolevIndex {
    pub const L2: SobolevIndex = SobolevIndex(0.0);
    pub const H1: SobolevIndex = SobolevIndex(1.0);

    pub fn new(s: f64) -> Result<Self, SpectralError> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(SpectralError::InvalidSobolevIndex(s));
        }
        Ok(Self(s))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for SobolevIndex {
    type Error = SpectralError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        SobolevIndex::new(value)
    }
}

impl From<SobolevIndex> for f64 {
    fn from(s: SobolevIndex) -> f64 {
        s.0
    }
}
