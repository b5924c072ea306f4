use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fixed_point::{self, FixedPointMap};
use super::{IntegratorConfig, StepError, StepReport};
use crate::spectral::{
    antiderivative_symbols, free_flow_multipliers, l2_norm, project, GridSpec, SpectralState,
    Squarer,
};

/// The three benchmarked time-stepping schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Implicit midpoint-averaged resonance-based scheme (symmetric, symplectic).
    Symplectic,
    /// First-order explicit resonance-based scheme with frozen amplitudes.
    ExplicitResonance,
    /// Implicit-midpoint Lawson exponential integrator.
    SymmetricLawson,
}

impl Method {
    pub const ALL: [Method; 3] = [
        Method::Symplectic,
        Method::ExplicitResonance,
        Method::SymmetricLawson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Symplectic => "symplectic",
            Method::ExplicitResonance => "explicit_resonance",
            Method::SymmetricLawson => "symmetric_lawson",
        }
    }

    pub fn is_implicit(self) -> bool {
        !matches!(self, Method::ExplicitResonance)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "symplectic" => Ok(Method::Symplectic),
            "explicit_resonance" | "explicit" => Ok(Method::ExplicitResonance),
            "symmetric_lawson" | "lawson" => Ok(Method::SymmetricLawson),
            other => Err(format!(
                "unknown method '{other}' (expected symplectic, explicit_resonance or symmetric_lawson)"
            )),
        }
    }
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[inline]
fn mul_into(out: &mut [Complex64], a: &[Complex64], b: &[Complex64]) {
    for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
        *o = x * y;
    }
}

/// Per-(grid, step) operator cache: free-flow phases for full and half
/// steps, the antiderivative symbol, and product buffers.
struct Operators {
    grid: GridSpec,
    /// `e^{-h∂ₓ³}` for the signed step `h`.
    back_full: Vec<Complex64>,
    /// `e^{h∂ₓ³}`.
    fwd_full: Vec<Complex64>,
    /// `e^{-(h/2)∂ₓ³}`.
    back_half: Vec<Complex64>,
    /// `e^{(h/2)∂ₓ³}`.
    fwd_half: Vec<Complex64>,
    /// `∂ₓ^{-1}`.
    inv_dx: Vec<Complex64>,
    /// `(1/2)∂ₓ`.
    half_dx: Vec<Complex64>,
    squarer: Squarer,
}

impl Operators {
    fn new(grid: GridSpec, step: f64, dealias: bool) -> Self {
        let half_dx = (0..grid.modes())
            .map(|k| {
                let m = grid.mode_of(k);
                if m == grid.nyquist() {
                    ZERO
                } else {
                    Complex64::new(0.0, 0.5 * m as f64)
                }
            })
            .collect();
        Self {
            grid,
            back_full: free_flow_multipliers(grid, -step),
            fwd_full: free_flow_multipliers(grid, step),
            back_half: free_flow_multipliers(grid, -0.5 * step),
            fwd_half: free_flow_multipliers(grid, 0.5 * step),
            inv_dx: antiderivative_symbols(grid),
            half_dx,
            squarer: Squarer::new(grid, dealias),
        }
    }
}

/// Fixed-point map of the symplectic scheme in the original variable:
///
/// `U ↦ e^{-h∂³}uⁿ + (1/24)(∂⁻¹U + e^{-h∂³}∂⁻¹uⁿ)² − (1/24)e^{-h∂³}(e^{h∂³}∂⁻¹U + ∂⁻¹uⁿ)²`
struct SymplecticMap<'a> {
    ops: &'a mut Operators,
    base: Vec<Complex64>,
    shifted_prim: Vec<Complex64>,
    prim: Vec<Complex64>,
    x: Vec<Complex64>,
    y: Vec<Complex64>,
    sx: Vec<Complex64>,
    sy: Vec<Complex64>,
}

impl<'a> SymplecticMap<'a> {
    fn new(ops: &'a mut Operators, un: &[Complex64]) -> Self {
        let m = un.len();
        let mut base = vec![ZERO; m];
        let mut prim = vec![ZERO; m];
        let mut shifted_prim = vec![ZERO; m];
        mul_into(&mut base, &ops.back_full, un);
        mul_into(&mut prim, &ops.inv_dx, un);
        mul_into(&mut shifted_prim, &ops.back_full, &prim);
        Self {
            ops,
            base,
            shifted_prim,
            prim,
            x: vec![ZERO; m],
            y: vec![ZERO; m],
            sx: vec![ZERO; m],
            sy: vec![ZERO; m],
        }
    }
}

impl FixedPointMap for SymplecticMap<'_> {
    fn apply(&mut self, guess: &[Complex64], out: &mut [Complex64]) -> f64 {
        let ops = &mut *self.ops;
        for k in 0..guess.len() {
            let p = ops.inv_dx[k] * guess[k];
            self.x[k] = p + self.shifted_prim[k];
            self.y[k] = ops.fwd_full[k] * p + self.prim[k];
        }
        ops.squarer
            .square_pair(&self.x, &self.y, &mut self.sx, &mut self.sy);
        const W: f64 = 1.0 / 24.0;
        for k in 0..out.len() {
            out[k] = self.base[k] + (self.sx[k] - ops.back_full[k] * self.sy[k]) * W;
        }
        project(out);
        (l2_norm(&self.sx) + l2_norm(&self.sy)) * W
    }
}

/// Fixed-point map of the implicit-midpoint Lawson scheme:
///
/// `U ↦ e^{-h∂³}uⁿ + h e^{-(h/2)∂³} N((e^{-(h/2)∂³}uⁿ + e^{(h/2)∂³}U)/2)`,
/// with `N(w) = (1/2)∂ₓ(w²)`.
struct LawsonMap<'a> {
    ops: &'a mut Operators,
    step: f64,
    base: Vec<Complex64>,
    half_prev: Vec<Complex64>,
    mid: Vec<Complex64>,
    sq: Vec<Complex64>,
}

impl<'a> LawsonMap<'a> {
    fn new(ops: &'a mut Operators, un: &[Complex64], step: f64) -> Self {
        let m = un.len();
        let mut base = vec![ZERO; m];
        let mut half_prev = vec![ZERO; m];
        mul_into(&mut base, &ops.back_full, un);
        mul_into(&mut half_prev, &ops.back_half, un);
        Self {
            ops,
            step,
            base,
            half_prev,
            mid: vec![ZERO; m],
            sq: vec![ZERO; m],
        }
    }
}

impl FixedPointMap for LawsonMap<'_> {
    fn apply(&mut self, guess: &[Complex64], out: &mut [Complex64]) -> f64 {
        let ops = &mut *self.ops;
        for k in 0..guess.len() {
            self.mid[k] = (self.half_prev[k] + ops.fwd_half[k] * guess[k]) * 0.5;
        }
        ops.squarer.square(&self.mid, &mut self.sq);
        let mut scale = 0.0;
        for k in 0..out.len() {
            let n = ops.half_dx[k] * self.sq[k] * self.step;
            scale += n.norm_sqr();
            out[k] = self.base[k] + ops.back_half[k] * n;
        }
        project(out);
        scale.sqrt()
    }
}

/// Reusable time stepper for one method, grid and step size.
///
/// Phase multipliers are evaluated once at construction from the signed step
/// `±tau`; no time-dependent phases appear in the schemes.
pub struct Stepper {
    method: Method,
    cfg: IntegratorConfig,
    ops: Operators,
}

impl Stepper {
    pub fn new(method: Method, grid: GridSpec, cfg: IntegratorConfig) -> Result<Self, StepError> {
        cfg.validate()?;
        Ok(Self {
            method,
            cfg,
            ops: Operators::new(grid, cfg.signed_step(), cfg.dealias),
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.cfg
    }

    pub fn grid(&self) -> GridSpec {
        self.ops.grid
    }

    pub fn step(&mut self, un: &SpectralState) -> Result<StepReport, StepError> {
        if un.grid() != self.ops.grid {
            return Err(StepError::Spectral(crate::spectral::SpectralError::GridMismatch {
                left: un.grid().modes(),
                right: self.ops.grid.modes(),
            }));
        }
        match self.method {
            Method::Symplectic => {
                let mut guess = un.coeffs().to_vec();
                let mut map = SymplecticMap::new(&mut self.ops, un.coeffs());
                let sol = fixed_point::solve(&mut map, un.grid(), &self.cfg, &mut guess)?;
                Ok(StepReport {
                    state: SpectralState {
                        grid: un.grid(),
                        coeffs: guess,
                    },
                    fp_iterations: sol.iterations,
                    fp_residual: sol.residual,
                })
            }
            Method::SymmetricLawson => {
                let mut guess = un.coeffs().to_vec();
                let step = self.cfg.signed_step();
                let mut map = LawsonMap::new(&mut self.ops, un.coeffs(), step);
                let sol = fixed_point::solve(&mut map, un.grid(), &self.cfg, &mut guess)?;
                Ok(StepReport {
                    state: SpectralState {
                        grid: un.grid(),
                        coeffs: guess,
                    },
                    fp_iterations: sol.iterations,
                    fp_residual: sol.residual,
                })
            }
            Method::ExplicitResonance => {
                let state = self.explicit(un);
                if !state.is_finite() {
                    return Err(StepError::FixedPointDivergence {
                        iterations: 0,
                        residual: f64::NAN,
                        cause: super::DivergenceCause::NonFinite,
                    });
                }
                Ok(StepReport {
                    state,
                    fp_iterations: 0,
                    fp_residual: 0.0,
                })
            }
        }
    }

    /// `e^{-h∂³}uⁿ + (1/6)(e^{-h∂³}∂⁻¹uⁿ)² − (1/6)e^{-h∂³}(∂⁻¹uⁿ)²`
    fn explicit(&mut self, un: &SpectralState) -> SpectralState {
        let ops = &mut self.ops;
        let m = un.grid().modes();
        let mut prim = vec![ZERO; m];
        let mut shifted = vec![ZERO; m];
        mul_into(&mut prim, &ops.inv_dx, un.coeffs());
        mul_into(&mut shifted, &ops.back_full, &prim);
        let mut s_shifted = vec![ZERO; m];
        let mut s_prim = vec![ZERO; m];
        ops.squarer
            .square_pair(&shifted, &prim, &mut s_shifted, &mut s_prim);
        let mut out: Vec<Complex64> = (0..m)
            .map(|k| {
                ops.back_full[k] * un.coeffs()[k]
                    + (s_shifted[k] - ops.back_full[k] * s_prim[k]) / 6.0
            })
            .collect();
        project(&mut out);
        SpectralState {
            grid: un.grid(),
            coeffs: out,
        }
    }
}

/// One step of the symplectic resonance-based scheme.
pub fn symplectic_resonance_step(
    un: &SpectralState,
    cfg: &IntegratorConfig,
) -> Result<StepReport, StepError> {
    Stepper::new(Method::Symplectic, un.grid(), *cfg)?.step(un)
}

/// One step of the explicit first-order resonance-based scheme.
pub fn explicit_resonance_step(
    un: &SpectralState,
    cfg: &IntegratorConfig,
) -> Result<SpectralState, StepError> {
    Ok(Stepper::new(Method::ExplicitResonance, un.grid(), *cfg)?
        .step(un)?
        .state)
}

/// One step of the implicit-midpoint Lawson scheme.
pub fn symmetric_lawson_step(
    un: &SpectralState,
    cfg: &IntegratorConfig,
) -> Result<StepReport, StepError> {
    Stepper::new(Method::SymmetricLawson, un.grid(), *cfg)?.step(un)
}
