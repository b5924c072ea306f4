use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{output, HarnessError};
use crate::initial_data::{random_rough, smooth_profile, RoughDataSpec};
use crate::integrators::{IntegratorConfig, Method};
use crate::spectral::{GridSpec, SpectralState};

/// Experiment kind, one driver each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Converge,
    Conserve,
    Symplecticity,
    ResonanceSweep,
    Solve,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Converge => "converge",
            ExperimentKind::Conserve => "conserve",
            ExperimentKind::Symplecticity => "symplecticity",
            ExperimentKind::ResonanceSweep => "resonance_sweep",
            ExperimentKind::Solve => "solve",
        }
    }
}

/// Initial condition of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    /// Random data with `|û_m| ~ m^{-θ}`.
    Rough { theta: f64, seed: u64 },
    /// `1/(10(2 + sin x))` minus its mean.
    Smooth,
    Zero,
    /// A state previously written by a solve run.
    StateFile { path: PathBuf },
}

/// Fixed-point stopping tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FpTol {
    Rule(FpTolRule),
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FpTolRule {
    /// `τ⁴`, below the local error of a second-order step.
    Tau4,
    /// Iterate until updates reach the rounding floor.
    Machine,
}

/// Tolerance that only the rounding floor can satisfy.
pub const MACHINE_FP_TOL: f64 = f64::MIN_POSITIVE;

impl std::str::FromStr for FpTol {
    type Err = String;

    /// Accepts `tau4`, `machine` or a positive number.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tau4" => Ok(FpTol::Rule(FpTolRule::Tau4)),
            "machine" => Ok(FpTol::Rule(FpTolRule::Machine)),
            other => match other.parse::<f64>() {
                Ok(v) if v > 0.0 && v.is_finite() => Ok(FpTol::Value(v)),
                _ => Err(format!("expected tau4, machine or a positive number, got '{s}'")),
            },
        }
    }
}

impl FpTol {
    pub fn resolve(self, tau: f64) -> f64 {
        match self {
            FpTol::Rule(FpTolRule::Tau4) => tau.powi(4),
            FpTol::Rule(FpTolRule::Machine) => MACHINE_FP_TOL,
            FpTol::Value(v) => v,
        }
    }
}

/// Declarative description of one experiment, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(rename = "M")]
    pub modes: usize,
    pub data: DataSpec,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub tau_grid: Vec<f64>,
    #[serde(rename = "T")]
    pub t_final: f64,
    /// Reference step of a convergence study; `min(tau_grid)/100` if absent.
    #[serde(default)]
    pub ref_tau: Option<f64>,
    #[serde(default)]
    pub output_path: PathBuf,
    #[serde(default)]
    pub dealias: bool,
    /// Defaults to `tau4` for convergence studies and `machine` otherwise.
    #[serde(default)]
    pub fp_tol: Option<FpTol>,
    #[serde(default = "default_max_iters")]
    pub fp_max_iters: usize,
    /// Sample every `stride` steps; 1 for solve runs and 10 otherwise.
    #[serde(default)]
    pub stride: Option<usize>,
    /// Seed of the second trajectory in a symplecticity run; `seed + 1` if absent.
    #[serde(default)]
    pub pair_seed: Option<u64>,
}

fn default_methods() -> Vec<Method> {
    vec![Method::Symplectic]
}

fn default_max_iters() -> usize {
    IntegratorConfig::DEFAULT_MAX_ITERS
}

/// Minimum number of step sizes in a resonance sweep.
pub const SWEEP_MIN_POINTS: usize = 200;

/// `n` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

impl ExperimentConfig {
    /// Minimal configuration of the given kind with a single symplectic method.
    pub fn new(kind: ExperimentKind, modes: usize, data: DataSpec, tau_grid: Vec<f64>, t_final: f64) -> Self {
        Self {
            kind,
            modes,
            data,
            methods: default_methods(),
            tau_grid,
            t_final,
            ref_tau: None,
            output_path: PathBuf::new(),
            dealias: false,
            fp_tol: None,
            fp_max_iters: default_max_iters(),
            stride: None,
            pair_seed: None,
        }
    }

    /// Parses a config; call [`validate`](Self::validate) before use.
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn grid(&self) -> Result<GridSpec, HarnessError> {
        GridSpec::new(self.modes).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn seed(&self) -> Option<u64> {
        match self.data {
            DataSpec::Rough { seed, .. } => Some(seed),
            _ => None,
        }
    }

    pub fn fp_tol_policy(&self) -> FpTol {
        self.fp_tol.unwrap_or(match self.kind {
            ExperimentKind::Converge => FpTol::Rule(FpTolRule::Tau4),
            _ => FpTol::Rule(FpTolRule::Machine),
        })
    }

    pub fn stride(&self) -> usize {
        self.stride.unwrap_or(match self.kind {
            ExperimentKind::Solve => 1,
            _ => 10,
        })
    }

    pub fn ref_tau(&self) -> f64 {
        self.ref_tau
            .unwrap_or_else(|| self.tau_grid.iter().copied().fold(f64::INFINITY, f64::min) / 100.0)
    }

    /// Step sizes actually used; a resonance sweep without an explicit grid
    /// covers `[0.01, 0.2]` with 200 log-spaced points.
    pub fn taus(&self) -> Vec<f64> {
        if self.tau_grid.is_empty() && self.kind == ExperimentKind::ResonanceSweep {
            log_spaced(0.01, 0.2, SWEEP_MIN_POINTS)
        } else {
            self.tau_grid.clone()
        }
    }

    /// Integrator settings for step `tau`.
    pub fn integrator(&self, tau: f64) -> Result<IntegratorConfig, HarnessError> {
        let cfg = IntegratorConfig::new(tau)
            .map_err(|e| HarnessError::Config(e.to_string()))?
            .with_fp_tol(self.fp_tol_policy().resolve(tau))
            .with_max_iters(self.fp_max_iters)
            .with_dealias(self.dealias);
        cfg.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(cfg)
    }

    fn state_for(&self, data: &DataSpec) -> Result<SpectralState, HarnessError> {
        let grid = self.grid()?;
        let bad = |e: String| HarnessError::Config(e);
        match data {
            DataSpec::Rough { theta, seed } => {
                let spec = RoughDataSpec::new(self.modes, *theta, *seed).map_err(|e| bad(e.to_string()))?;
                random_rough(&spec).map_err(|e| bad(e.to_string()))
            }
            DataSpec::Smooth => smooth_profile(self.modes).map_err(|e| bad(e.to_string())),
            DataSpec::Zero => Ok(SpectralState::zeros(grid)),
            DataSpec::StateFile { path } => {
                let state = output::load_state(path)?;
                if state.grid() != grid {
                    return Err(bad(format!(
                        "{} holds {} modes but M = {}",
                        path.display(),
                        state.grid().modes(),
                        self.modes
                    )));
                }
                Ok(state)
            }
        }
    }

    pub fn initial_state(&self) -> Result<SpectralState, HarnessError> {
        self.state_for(&self.data)
    }

    /// Second initial state of a symplecticity run.
    pub fn pair_state(&self) -> Result<SpectralState, HarnessError> {
        match self.data {
            DataSpec::Rough { theta, seed } => {
                let seed = self.pair_seed.unwrap_or(seed.wrapping_add(1));
                self.state_for(&DataSpec::Rough { theta, seed })
            }
            _ => self.initial_state(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        self.grid()?;
        if let DataSpec::Rough { theta, .. } = self.data {
            if !(theta > 0.5 && theta.is_finite()) {
                return fail(format!("theta must exceed 1/2, got {theta}"));
            }
        }
        if self.methods.is_empty() {
            return fail("methods must not be empty".into());
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return fail(format!("method {m} listed twice"));
            }
        }
        if !self.t_final.is_finite() || (self.kind != ExperimentKind::Solve && self.t_final <= 0.0) {
            return fail(format!("T must be positive, got {}", self.t_final));
        }
        let taus = self.taus();
        if taus.is_empty() {
            return fail("tau_grid must not be empty".into());
        }
        if let Some(bad) = taus.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return fail(format!("step sizes must be positive, got {bad}"));
        }
        if self.stride == Some(0) {
            return fail("stride must be at least 1".into());
        }
        if self.fp_max_iters == 0 {
            return fail("fp_max_iters must be at least 1".into());
        }
        if let Some(FpTol::Value(v)) = self.fp_tol {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("fp_tol must be positive, got {v}"));
            }
        }
        match self.kind {
            ExperimentKind::Converge => {
                let min = taus.iter().copied().fold(f64::INFINITY, f64::min);
                let r = self.ref_tau();
                if !(r > 0.0 && r <= min / 20.0 * (1.0 + 1e-12)) {
                    return fail(format!("ref_tau must lie in (0, min(tau_grid)/20], got {r}"));
                }
                for &tau in taus.iter().chain(std::iter::once(&r)) {
                    let n = self.t_final / tau;
                    if (n - n.round()).abs() > 1e-6 * n.max(1.0) {
                        return fail(format!("T = {} is not a multiple of tau = {tau}", self.t_final));
                    }
                }
            }
            ExperimentKind::ResonanceSweep => {
                if taus.len() < SWEEP_MIN_POINTS {
                    return fail(format!(
                        "a resonance sweep needs at least {SWEEP_MIN_POINTS} step sizes, got {}",
                        taus.len()
                    ));
                }
                if self.methods.len() != 1 {
                    return fail("a resonance sweep runs exactly one method".into());
                }
            }
            ExperimentKind::Solve => {
                if self.methods.len() != 1 || taus.len() != 1 {
                    return fail("a solve run takes exactly one method and one step size".into());
                }
            }
            ExperimentKind::Conserve | ExperimentKind::Symplecticity => {
                if taus.len() != 1 {
                    return fail("conservation runs take exactly one step size".into());
                }
            }
        }
        Ok(())
    }
}
