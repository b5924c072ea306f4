use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::fit::{analyze_sweep, fit_convergence, SlopeFit, SweepAnalysis};
use super::{ExperimentConfig, ExperimentKind, HarnessError};
use crate::diagnostics::{h_error, hamiltonian, momentum, symplectic_pairing, DiagnosticsRecord};
use crate::integrators::{evolve, step_count, IntegratorConfig, Method, StepError, Stepper};
use crate::spectral::{SobolevIndex, SpectralState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Diverged,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Diverged => "diverged",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub method: Method,
    pub tau: f64,
    pub h1_error: Option<f64>,
    pub wall_time_s: f64,
    pub fp_iter_mean: Option<f64>,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodFit {
    pub method: Method,
    pub fit: Option<SlopeFit>,
    pub diverged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceOutcome {
    pub ref_tau: f64,
    /// `‖u_ref − u_ref'‖_{H¹}` between two reference runs with different steps.
    pub reference_floor: f64,
    pub rows: Vec<ConvergenceRow>,
    pub fits: Vec<MethodFit>,
}

impl ConvergenceOutcome {
    pub fn fit(&self, method: Method) -> Option<SlopeFit> {
        self.fits.iter().find(|f| f.method == method).and_then(|f| f.fit)
    }
}

/// One sampled point of a drift series: `|I₀(uⁿ) − I₀(u⁰)|` and
/// `|I₁(uⁿ) − I₁(u⁰)|`, or the pairing drift `|ω(uⁿ, wⁿ) − ω(u⁰, w⁰)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftSample {
    pub step: usize,
    pub time: f64,
    pub errors: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftSeries {
    pub method: Method,
    pub status: Status,
    pub samples: Vec<DriftSample>,
    /// Maxima over every step, not only the sampled ones.
    pub max_errors: [f64; 2],
    pub steps_completed: usize,
    pub max_fp_iterations: usize,
    pub mean_fp_iterations: f64,
    /// Time and message of the failed step.
    pub failure: Option<(f64, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub tau: f64,
    pub max_hamiltonian_err: Option<f64>,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutcome {
    pub method: Method,
    pub rows: Vec<SweepRow>,
    pub analysis: SweepAnalysis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub method: Method,
    pub series: Vec<DiagnosticsRecord>,
    pub final_state: SpectralState,
    pub fp_tol: f64,
    pub steps: usize,
}

fn require(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<(), HarnessError> {
    if cfg.kind != kind {
        return Err(HarnessError::Config(format!(
            "expected a {} experiment, got {}",
            kind.name(),
            cfg.kind.name()
        )));
    }
    cfg.validate()
}

fn reference_run(
    u0: &SpectralState,
    cfg: &ExperimentConfig,
    tau: f64,
) -> Result<SpectralState, HarnessError> {
    let icfg = cfg.integrator(tau)?;
    evolve(u0, Method::Symplectic, &icfg, cfg.t_final, &mut [])
        .map(|t| t.final_state)
        .map_err(|e| HarnessError::Reference(format!("reference run at tau = {tau}: {e}")))
}

/// Order study: every `(method, τ)` cell is compared in `H¹` at time `T`
/// against a symplectic reference computed with `ref_tau`.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceOutcome, HarnessError> {
    require(cfg, ExperimentKind::Converge)?;
    let u0 = cfg.initial_state()?;
    let ref_tau = cfg.ref_tau();
    let coarse = 2.0 * ref_tau;
    let n_coarse = cfg.t_final / coarse;
    let check_tau = if (n_coarse - n_coarse.round()).abs() <= 1e-6 * n_coarse.max(1.0) {
        coarse
    } else {
        ref_tau / 2.0
    };
    log::info!("converge: reference runs at tau = {ref_tau:e} and {check_tau:e}");
    let (reference, check) = rayon::join(
        || reference_run(&u0, cfg, ref_tau),
        || reference_run(&u0, cfg, check_tau),
    );
    let (reference, check) = (reference?, check?);
    let reference_floor = h_error(&reference, &check, SobolevIndex::H1)?;

    let cells: Vec<(Method, f64)> = cfg
        .methods
        .iter()
        .flat_map(|&m| cfg.tau_grid.iter().map(move |&t| (m, t)))
        .collect();
    let results: Vec<Result<ConvergenceRow, HarnessError>> = cells
        .par_iter()
        .map(|&(method, tau)| {
            let icfg = cfg.integrator(tau)?;
            let start = Instant::now();
            let run = evolve(&u0, method, &icfg, cfg.t_final, &mut []);
            let wall_time_s = start.elapsed().as_secs_f64();
            Ok(match run {
                Ok(traj) => ConvergenceRow {
                    method,
                    tau,
                    h1_error: Some(h_error(&traj.final_state, &reference, SobolevIndex::H1)?),
                    wall_time_s,
                    fp_iter_mean: Some(traj.mean_fp_iterations()),
                    status: Status::Ok,
                },
                Err(e) => {
                    log::warn!("converge: {method} at tau = {tau}: {e}");
                    ConvergenceRow {
                        method,
                        tau,
                        h1_error: None,
                        wall_time_s,
                        fp_iter_mean: None,
                        status: Status::Diverged,
                    }
                }
            })
        })
        .collect();
    let mut rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| a.method.cmp(&b.method).then(a.tau.total_cmp(&b.tau)));

    let fits = cfg
        .methods
        .iter()
        .map(|&method| {
            let mine: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.method == method).collect();
            let taus: Vec<f64> = mine.iter().map(|r| r.tau).collect();
            let errs: Vec<Option<f64>> = mine.iter().map(|r| r.h1_error).collect();
            MethodFit {
                method,
                fit: fit_convergence(&taus, &errs, reference_floor),
                diverged: mine.iter().filter(|r| r.status == Status::Diverged).count(),
            }
        })
        .collect();
    Ok(ConvergenceOutcome {
        ref_tau,
        reference_floor,
        rows,
        fits,
    })
}

/// Co-evolves `states` with one method, calling `measure` after every step.
fn drift_run<F>(
    method: Method,
    icfg: IntegratorConfig,
    states: Vec<SpectralState>,
    steps: usize,
    stride: usize,
    mut measure: F,
) -> DriftSeries
where
    F: FnMut(&[SpectralState]) -> [f64; 2],
{
    let grid = states[0].grid();
    let h = icfg.signed_step();
    let mut series = DriftSeries {
        method,
        status: Status::Ok,
        samples: vec![DriftSample {
            step: 0,
            time: 0.0,
            errors: measure(&states),
        }],
        max_errors: [0.0; 2],
        steps_completed: 0,
        max_fp_iterations: 0,
        mean_fp_iterations: 0.0,
        failure: None,
    };
    series.max_errors = series.samples[0].errors;
    let mut stepper = match Stepper::new(method, grid, icfg) {
        Ok(s) => s,
        Err(e) => {
            series.status = Status::Diverged;
            series.failure = Some((0.0, e.to_string()));
            return series;
        }
    };
    let mut states = states;
    let mut total_iters = 0usize;
    let mut sweeps = 0usize;
    'steps: for n in 1..=steps {
        for s in states.iter_mut() {
            match stepper.step(s) {
                Ok(report) => {
                    total_iters += report.fp_iterations;
                    sweeps += 1;
                    series.max_fp_iterations = series.max_fp_iterations.max(report.fp_iterations);
                    *s = report.state;
                }
                Err(e) => {
                    log::warn!("{method}: step {n} failed: {e}");
                    series.status = Status::Diverged;
                    series.failure = Some((n as f64 * h, e.to_string()));
                    break 'steps;
                }
            }
        }
        let errors = measure(&states);
        for (m, e) in series.max_errors.iter_mut().zip(errors) {
            *m = m.max(e);
        }
        series.steps_completed = n;
        if n % stride == 0 || n == steps {
            series.samples.push(DriftSample {
                step: n,
                time: n as f64 * h,
                errors,
            });
        }
    }
    if sweeps > 0 {
        series.mean_fp_iterations = total_iters as f64 / sweeps as f64;
    }
    series
}

fn methods_in_parallel<F>(cfg: &ExperimentConfig, run: F) -> Result<Vec<DriftSeries>, HarnessError>
where
    F: Fn(Method, IntegratorConfig, usize) -> Result<DriftSeries, HarnessError> + Sync,
{
    let tau = cfg.tau_grid[0];
    let icfg = cfg.integrator(tau)?;
    let steps = step_count(cfg.t_final, tau);
    let mut out = cfg
        .methods
        .par_iter()
        .map(|&m| run(m, icfg, steps))
        .collect::<Result<Vec<_>, _>>()?;
    out.sort_by_key(|s| s.method);
    Ok(out)
}

/// Long-time drift of momentum and Hamiltonian for each method at one step size.
pub fn run_conservation(cfg: &ExperimentConfig) -> Result<Vec<DriftSeries>, HarnessError> {
    require(cfg, ExperimentKind::Conserve)?;
    let u0 = cfg.initial_state()?;
    let (i0, i1) = (momentum(&u0), hamiltonian(&u0, cfg.dealias));
    let dealias = cfg.dealias;
    methods_in_parallel(cfg, |method, icfg, steps| {
        Ok(drift_run(method, icfg, vec![u0.clone()], steps, cfg.stride(), |s| {
            [
                (momentum(&s[0]) - i0).abs(),
                (hamiltonian(&s[0], dealias) - i1).abs(),
            ]
        }))
    })
}

/// Drift of the pairing `ω(uⁿ, wⁿ)` along two trajectories of the same method.
pub fn run_symplecticity(cfg: &ExperimentConfig) -> Result<Vec<DriftSeries>, HarnessError> {
    require(cfg, ExperimentKind::Symplecticity)?;
    let u0 = cfg.initial_state()?;
    let w0 = cfg.pair_state()?;
    let omega0 = symplectic_pairing(&u0, &w0)?;
    methods_in_parallel(cfg, |method, icfg, steps| {
        Ok(drift_run(method, icfg, vec![u0.clone(), w0.clone()], steps, cfg.stride(), |s| {
            let omega = symplectic_pairing(&s[0], &s[1]).expect("trajectories share a grid");
            [(omega - omega0).norm(), 0.0]
        }))
    })
}

/// Largest Hamiltonian error over `[0, T]` for every step size of the grid.
pub fn run_resonance_sweep(cfg: &ExperimentConfig) -> Result<SweepOutcome, HarnessError> {
    require(cfg, ExperimentKind::ResonanceSweep)?;
    let u0 = cfg.initial_state()?;
    let method = cfg.methods[0];
    let h0 = hamiltonian(&u0, cfg.dealias);
    let mut taus = cfg.taus();
    taus.sort_by(f64::total_cmp);
    let rows = taus
        .par_iter()
        .map(|&tau| {
            let icfg = cfg.integrator(tau)?;
            let mut worst = 0.0f64;
            let mut observe = |info: &crate::integrators::StepInfo| {
                worst = worst.max((hamiltonian(&info.report.state, icfg.dealias) - h0).abs());
            };
            let run = evolve(&u0, method, &icfg, cfg.t_final, &mut [&mut observe]);
            Ok(match run {
                Ok(_) => SweepRow {
                    tau,
                    max_hamiltonian_err: Some(worst),
                    status: Status::Ok,
                },
                Err(e) => {
                    log::warn!("sweep: tau = {tau}: {e}");
                    SweepRow {
                        tau,
                        max_hamiltonian_err: None,
                        status: Status::Diverged,
                    }
                }
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let errs: Vec<Option<f64>> = rows.iter().map(|r| r.max_hamiltonian_err).collect();
    let analysis = analyze_sweep(&taus, &errs);
    Ok(SweepOutcome {
        method,
        rows,
        analysis,
    })
}

/// Single trajectory with a diagnostics record every `stride` steps. A
/// negative `T` runs backward in time.
pub fn run_solve(cfg: &ExperimentConfig) -> Result<SolveOutcome, HarnessError> {
    require(cfg, ExperimentKind::Solve)?;
    let u0 = cfg.initial_state()?;
    let method = cfg.methods[0];
    let tau = cfg.tau_grid[0];
    let mut icfg = cfg.integrator(tau)?;
    if cfg.t_final < 0.0 {
        icfg = icfg.reversed();
    }
    let h = icfg.signed_step();
    let stride = cfg.stride();
    let steps = step_count(cfg.t_final.abs(), tau);
    let dealias = cfg.dealias;
    let start = Instant::now();
    let mut series = vec![DiagnosticsRecord::sample(0, h, &u0, dealias, None, 0.0)];
    let mut observe = |info: &crate::integrators::StepInfo| {
        if info.step.is_multiple_of(stride) || info.step == steps {
            series.push(DiagnosticsRecord::sample(
                info.step,
                h,
                &info.report.state,
                dealias,
                Some(info.report.fp_iterations),
                start.elapsed().as_secs_f64(),
            ));
        }
    };
    let traj = evolve(&u0, method, &icfg, cfg.t_final.abs(), &mut [&mut observe])
        .map_err(|e| match e.source {
            StepError::InvalidConfig(msg) => HarnessError::Config(msg),
            _ => HarnessError::Step(e.to_string()),
        })?;
    Ok(SolveOutcome {
        method,
        series,
        final_state: traj.final_state,
        fp_tol: icfg.fp_tol,
        steps,
    })
}
