use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::state::project;
use super::GridSpec;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(len), p.plan_fft_inverse(len))
    })
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Forward/inverse DFT pair of a fixed length with its own scratch space.
///
/// `inverse` evaluates `z_j = Σ_k c_k e^{2πijk/L}` (no scaling) and `forward`
/// evaluates `c_k = (1/L) Σ_j z_j e^{-2πijk/L}`.
pub(crate) struct Dft {
    len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Dft {
    pub(crate) fn new(len: usize) -> Self {
        let (fwd, inv) = plan(len);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        Self {
            len,
            fwd,
            inv,
            scratch: vec![ZERO; scratch_len],
        }
    }

    pub(crate) fn inverse(&mut self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.inv.process_with_scratch(buf, &mut self.scratch);
    }

    pub(crate) fn forward(&mut self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.fwd.process_with_scratch(buf, &mut self.scratch);
        let inv_len = 1.0 / self.len as f64;
        for c in buf.iter_mut() {
            *c *= inv_len;
        }
    }
}

/// Quadrature length used for products: `M` for the aliased collocation
/// product, otherwise the smallest even length `>= 3M/2`.
pub(crate) fn product_len(grid: GridSpec, dealias: bool) -> usize {
    let m = grid.modes();
    if !dealias {
        return m;
    }
    let l = (3 * m).div_ceil(2);
    l + l % 2
}

/// Reusable engine for squaring fields in Fourier space.
///
/// With `dealias = false` the product is the collocation product on the
/// `M`-point grid, i.e. the wrapped convolution. With `dealias = true` the
/// inputs are zero-padded so no wrapped term reaches a retained mode.
/// Results are always projected (mean and Nyquist removed).
pub(crate) struct Squarer {
    grid: GridSpec,
    padded_len: usize,
    dft: Dft,
    buf: Vec<Complex64>,
}

impl Squarer {
    pub(crate) fn new(grid: GridSpec, dealias: bool) -> Self {
        let padded_len = product_len(grid, dealias);
        Self {
            grid,
            padded_len,
            dft: Dft::new(padded_len),
            buf: vec![ZERO; padded_len],
        }
    }

    fn scatter(&mut self, a: &[Complex64], b: Option<&[Complex64]>) {
        let m = self.grid.modes();
        let l = self.padded_len as i64;
        self.buf.fill(ZERO);
        let i = Complex64::new(0.0, 1.0);
        for k in 0..m {
            let mode = self.grid.mode_of(k);
            if mode == self.grid.nyquist() {
                continue;
            }
            let dst = mode.rem_euclid(l) as usize;
            self.buf[dst] = match b {
                Some(b) => a[k] + i * b[k],
                None => a[k],
            };
        }
    }

    fn gather(&self, out: &mut [Complex64]) {
        let l = self.padded_len as i64;
        for (k, o) in out.iter_mut().enumerate() {
            let mode = self.grid.mode_of(k);
            *o = self.buf[mode.rem_euclid(l) as usize];
        }
        project(out);
    }

    /// `out <- P(a^2)` where `a` holds the coefficients of a real field.
    pub(crate) fn square(&mut self, a: &[Complex64], out: &mut [Complex64]) {
        self.scatter(a, None);
        self.dft.inverse(&mut self.buf);
        for z in self.buf.iter_mut() {
            *z = Complex64::new(z.re * z.re, 0.0);
        }
        self.dft.forward(&mut self.buf);
        self.gather(out);
    }

    /// Squares two real fields with one transform pair by packing them as
    /// the real and imaginary parts of a single complex field.
    pub(crate) fn square_pair(
        &mut self,
        a: &[Complex64],
        b: &[Complex64],
        out_a: &mut [Complex64],
        out_b: &mut [Complex64],
    ) {
        self.scatter(a, Some(b));
        self.dft.inverse(&mut self.buf);
        for z in self.buf.iter_mut() {
            *z = Complex64::new(z.re * z.re, z.im * z.im);
        }
        self.dft.forward(&mut self.buf);
        let l = self.padded_len as i64;
        let half_i = Complex64::new(0.0, 0.5);
        for k in 0..self.grid.modes() {
            let mode = self.grid.mode_of(k);
            let p = self.buf[mode.rem_euclid(l) as usize];
            let q = self.buf[(-mode).rem_euclid(l) as usize].conj();
            out_a[k] = (p + q) * 0.5;
            out_b[k] = -(p - q) * half_i;
        }
        project(out_a);
        project(out_b);
    }
}
