//! First integrals, the symplectic pairing, and Sobolev error functionals.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spectral::{sobolev_norm, SobolevIndex, SpectralError, SpectralState};

/// Momentum `I₀[u] = ∫ u² dx = 2π Σ |û_m|²`.
pub fn momentum(u: &SpectralState) -> f64 {
    2.0 * PI * u.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>()
}

/// `∫ u³ dx` by the trapezoid rule on `points` equispaced nodes.
fn cubic_integral(u: &SpectralState, points: usize) -> f64 {
    let grid = u.grid();
    let mut buf = vec![Complex64::new(0.0, 0.0); points];
    for (k, c) in u.coeffs().iter().enumerate() {
        let m = grid.mode_of(k);
        buf[m.rem_euclid(points as i64) as usize] = *c;
    }
    crate::spectral::inverse_dft(&mut buf);
    let sum: f64 = buf.iter().map(|z| z.re * z.re * z.re).sum();
    2.0 * PI * sum / points as f64
}

/// Hamiltonian `I₁[u] = -(1/2) ∫ 3u_x² + u³ dx`.
///
/// The quadratic part is evaluated exactly via Parseval. The cubic part uses
/// the trapezoid rule on `2M` points when `dealias` is set, which is exact for
/// the truncated field, and on the `M` collocation points otherwise.
pub fn hamiltonian(u: &SpectralState, dealias: bool) -> f64 {
    let grid = u.grid();
    let gradient: f64 = u
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let m = grid.mode_of(k) as f64;
            m * m * c.norm_sqr()
        })
        .sum();
    let points = if dealias { 2 * grid.modes() } else { grid.modes() };
    -1.5 * 2.0 * PI * gradient - 0.5 * cubic_integral(u, points)
}

/// Symplectic pairing `ω(u, w) = Σ_{m≠0} sgn(m) û_m ŵ_{-m}`.
pub fn symplectic_pairing(u: &SpectralState, w: &SpectralState) -> Result<Complex64, SpectralError> {
    if u.grid() != w.grid() {
        return Err(SpectralError::GridMismatch {
            left: u.grid().modes(),
            right: w.grid().modes(),
        });
    }
    let grid = u.grid();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, m) in grid.active_modes() {
        let partner = grid.slot_of(-m).expect("active modes have partners");
        let term = u.coeffs()[k] * w.coeffs()[partner];
        if m > 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// `Σ_{m≠0} û_m ŵ_{-m} / m = (2πi)⁻¹ ∫ u ∂⁻¹w`, the two-form preserved by
/// the linearised flow. Meaningful on tangent vectors, not on states.
pub fn canonical_pairing(u: &SpectralState, w: &SpectralState) -> Result<Complex64, SpectralError> {
    if u.grid() != w.grid() {
        return Err(SpectralError::GridMismatch {
            left: u.grid().modes(),
            right: w.grid().modes(),
        });
    }
    let grid = u.grid();
    Ok(grid
        .active_modes()
        .map(|(k, m)| {
            let partner = grid.slot_of(-m).expect("active modes have partners");
            u.coeffs()[k] * w.coeffs()[partner] / m as f64
        })
        .sum())
}

/// `‖u - reference‖_{H^s}`.
pub fn h_error(u: &SpectralState, reference: &SpectralState, s: SobolevIndex) -> Result<f64, SpectralError> {
    Ok(sobolev_norm(&u.checked_sub(reference)?, s))
}

/// Per-step diagnostic sample of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub step_index: usize,
    pub time: f64,
    pub momentum: f64,
    pub hamiltonian: f64,
    pub h1_error_vs_ref: Option<f64>,
    pub fp_iterations: Option<usize>,
    pub wall_time_s: f64,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: [&'static str; 7] = [
        "step_index",
        "time",
        "momentum",
        "hamiltonian",
        "h1_error_vs_ref",
        "fp_iterations",
        "wall_time_s",
    ];

    /// Samples the integrals of `u` at step `step_index` of a run with step `tau`.
    pub fn sample(
        step_index: usize,
        tau: f64,
        u: &SpectralState,
        dealias: bool,
        fp_iterations: Option<usize>,
        wall_time_s: f64,
    ) -> Self {
        Self {
            step_index,
            time: step_index as f64 * tau,
            momentum: momentum(u),
            hamiltonian: hamiltonian(u, dealias),
            h1_error_vs_ref: None,
            fp_iterations,
            wall_time_s,
        }
    }

    pub fn csv_fields(&self) -> Vec<String> {
        use crate::harness::fmt_f64;
        vec![
            self.step_index.to_string(),
            fmt_f64(self.time),
            fmt_f64(self.momentum),
            fmt_f64(self.hamiltonian),
            self.h1_error_vs_ref.map(fmt_f64).unwrap_or_default(),
            self.fp_iterations.map(|n| n.to_string()).unwrap_or_default(),
            fmt_f64(self.wall_time_s),
        ]
    }
}
