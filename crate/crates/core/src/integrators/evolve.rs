use std::time::{Duration, Instant};

use super::{IntegratorConfig, Method, StepError, StepReport, Stepper};
use crate::spectral::SpectralState;

/// What an observer sees after each step.
pub struct StepInfo<'a> {
    /// Index of the completed step, starting at 1.
    pub step: usize,
    /// Time reached, `step * (±tau)`.
    pub time: f64,
    pub report: &'a StepReport,
}

#[derive(Debug, thiserror::Error)]
#[error("step {step} failed: {source}")]
pub struct EvolveError {
    pub step: usize,
    #[source]
    pub source: StepError,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub final_state: SpectralState,
    pub steps: usize,
    pub total_fp_iterations: usize,
    pub max_fp_iterations: usize,
    pub wall_time: Duration,
}

impl Trajectory {
    pub fn mean_fp_iterations(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.total_fp_iterations as f64 / self.steps as f64
        }
    }
}

/// Number of steps `round(T / tau)` needed to reach `t_final`.
pub fn step_count(t_final: f64, tau: f64) -> usize {
    (t_final / tau).round() as usize
}

/// Advances `u0` by `round(t_final / tau)` steps of `method`, calling every
/// observer after each step.
pub fn evolve(
    u0: &SpectralState,
    method: Method,
    cfg: &IntegratorConfig,
    t_final: f64,
    observers: &mut [&mut dyn FnMut(&StepInfo)],
) -> Result<Trajectory, EvolveError> {
    let wrap = |source| EvolveError { step: 0, source };
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(wrap(StepError::InvalidConfig(format!(
            "final time must be finite and non-negative, got {t_final}"
        ))));
    }
    let mut stepper = Stepper::new(method, u0.grid(), *cfg).map_err(wrap)?;
    let steps = step_count(t_final, cfg.tau);
    let start = Instant::now();
    let mut state = u0.clone();
    let mut total = 0;
    let mut max_iters = 0;
    let h = cfg.signed_step();
    for n in 1..=steps {
        let report = stepper
            .step(&state)
            .map_err(|source| EvolveError { step: n, source })?;
        total += report.fp_iterations;
        max_iters = max_iters.max(report.fp_iterations);
        let info = StepInfo {
            step: n,
            time: n as f64 * h,
            report: &report,
        };
        for obs in observers.iter_mut() {
            obs(&info);
        }
        state = report.state;
    }
    Ok(Trajectory {
        final_state: state,
        steps,
        total_fp_iterations: total,
        max_fp_iterations: max_iters,
        wall_time: start.elapsed(),
    })
}
