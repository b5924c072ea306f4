use num_complex::Complex64;

use super::fft::{Dft, Squarer};
use super::state::{project, INVARIANT_TOL};
use super::{GridSpec, SobolevIndex, SpectralError, SpectralState};

/// Diagonal symbol of the free flow `e^{t∂ₓ³}`: `e^{-i m³ t}` in FFT order.
///
/// `m³` is formed exactly in integers before the single multiplication by `t`.
pub fn free_flow_multipliers(grid: GridSpec, t: f64) -> Vec<Complex64> {
    (0..grid.modes())
        .map(|k| {
            let m = grid.mode_of(k) as f64;
            let (s, c) = (m * m * m * t).sin_cos();
            Complex64::new(c, -s)
        })
        .collect()
}

/// Samples `u(x_k) = Σ_m û_m e^{i m x_k}` together with the largest
/// imaginary residue, which is discarded.
pub fn to_physical_with_residue(state: &SpectralState) -> (Vec<f64>, f64) {
    let mut buf = state.coeffs.clone();
    Dft::new(buf.len()).inverse(&mut buf);
    let residue = buf.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    (buf.into_iter().map(|z| z.re).collect(), residue)
}

/// Field values at the collocation points `x_k = 2πk/M`.
pub fn to_physical(state: &SpectralState) -> Vec<f64> {
    to_physical_with_residue(state).0
}

/// Discrete Fourier transform of collocation samples, projected onto
/// zero-mean fields with a vanishing Nyquist mode.
pub fn to_spectral(grid: GridSpec, samples: &[f64]) -> Result<SpectralState, SpectralError> {
    if samples.len() != grid.modes() {
        return Err(SpectralError::LengthMismatch {
            expected: grid.modes(),
            found: samples.len(),
        });
    }
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    Dft::new(buf.len()).forward(&mut buf);
    project(&mut buf);
    Ok(SpectralState { grid, coeffs: buf })
}

/// Applies `e^{t∂ₓ³}`, i.e. `û_m ↦ e^{-i m³ t} û_m`.
pub fn free_flow(state: &SpectralState, t: f64) -> SpectralState {
    let mult = free_flow_multipliers(state.grid, t);
    apply_diagonal(state, &mult)
}

fn apply_diagonal(state: &SpectralState, mult: &[Complex64]) -> SpectralState {
    SpectralState {
        grid: state.grid,
        coeffs: state
            .coeffs
            .iter()
            .zip(mult)
            .map(|(c, w)| c * w)
            .collect(),
    }
}

/// `(i m)^order`, computed as a power of `i` times an exact power of `m`.
fn derivative_symbol(m: i64, order: u32) -> Complex64 {
    let mag = (m as f64).powi(order as i32);
    match order % 4 {
        0 => Complex64::new(mag, 0.0),
        1 => Complex64::new(0.0, mag),
        2 => Complex64::new(-mag, 0.0),
        _ => Complex64::new(0.0, -mag),
    }
}

/// `∂ₓ^order`: `û_m ↦ (i m)^order û_m`.
pub fn derivative(state: &SpectralState, order: u32) -> SpectralState {
    let grid = state.grid;
    let mut out = state.clone();
    for (k, c) in out.coeffs.iter_mut().enumerate() {
        *c *= derivative_symbol(grid.mode_of(k), order);
    }
    out
}

/// Symbol of `∂ₓ^{-1}` on the zero-mean subspace: `1/(i m)`, zero at `m = 0`
/// and at the Nyquist mode.
pub(crate) fn antiderivative_symbols(grid: GridSpec) -> Vec<Complex64> {
    (0..grid.modes())
        .map(|k| {
            let m = grid.mode_of(k);
            if m == 0 || m == grid.nyquist() {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -1.0 / m as f64)
            }
        })
        .collect()
}

/// `∂ₓ^{-1}`: `û_m ↦ û_m / (i m)` on the zero-mean subspace.
pub fn antiderivative(state: &SpectralState) -> Result<SpectralState, SpectralError> {
    let mean = state.coeffs[0];
    if mean.norm() > INVARIANT_TOL {
        return Err(SpectralError::InvariantViolation(format!(
            "antiderivative needs a zero-mean field, mean mode is {mean}"
        )));
    }
    Ok(apply_diagonal(state, &antiderivative_symbols(state.grid)))
}

/// Square of the field, returned in Fourier space with the mean removed.
///
/// `dealias = false` gives the collocation product on the `M`-point grid
/// (wrapped convolution); `dealias = true` pads to at least `3M/2` points.
pub fn pointwise_square(state: &SpectralState, dealias: bool) -> SpectralState {
    let mut out = vec![Complex64::new(0.0, 0.0); state.grid.modes()];
    Squarer::new(state.grid, dealias).square(&state.coeffs, &mut out);
    SpectralState {
        grid: state.grid,
        coeffs: out,
    }
}

/// `(Σ_{m≠0} |m|^{2s} |û_m|²)^{1/2}`.
pub fn sobolev_norm(state: &SpectralState, s: SobolevIndex) -> f64 {
    sobolev_norm_coeffs(state.grid, &state.coeffs, s.get())
}

pub(crate) fn sobolev_norm_coeffs(grid: GridSpec, coeffs: &[Complex64], s: f64) -> f64 {
    let mut acc = 0.0;
    for (k, c) in coeffs.iter().enumerate() {
        let m = grid.mode_of(k);
        if m == 0 {
            continue;
        }
        let w = if s == 0.0 {
            1.0
        } else {
            (m.unsigned_abs() as f64).powf(2.0 * s)
        };
        acc += w * c.norm_sqr();
    }
    acc.sqrt()
}

pub(crate) fn l2_norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
