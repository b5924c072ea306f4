//! Declarative experiment drivers: convergence orders, long-time
//! conservation, symplecticity, resonant step-size sweeps and single solves.
//!
//! Every driver is a pure function of its [`ExperimentConfig`]. Cells run in
//! parallel on the rayon pool and rows are sorted before output, so tables
//! are reproducible apart from wall-time columns.

mod config;
mod experiments;
mod fit;
mod output;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{
    log_spaced, DataSpec, ExperimentConfig, ExperimentKind, FpTol, FpTolRule, MACHINE_FP_TOL,
    SWEEP_MIN_POINTS,
};
pub use experiments::{
    run_conservation, run_convergence, run_resonance_sweep, run_solve, run_symplecticity,
    ConvergenceOutcome, ConvergenceRow, DriftSample, DriftSeries, MethodFit, SolveOutcome, Status,
    SweepOutcome, SweepRow,
};
pub use fit::{
    analyze_sweep, fit_convergence, fit_slope, SlopeFit, SweepAnalysis, ENVELOPE_HALF_WIDTH,
    FLOOR_FACTOR, SPIKE_FACTOR,
};
pub use output::{format_state, load_state, parse_state, sibling, Metadata, Table};

use crate::diagnostics::DiagnosticsRecord;
use crate::spectral::SpectralError;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_REFERENCE: i32 = 3;
pub const EXIT_ALL_DIVERGED: i32 = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("reference solution failed: {0}")]
    Reference(String),
    #[error("{0}")]
    Step(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => EXIT_CONFIG,
            HarnessError::Reference(_) => EXIT_REFERENCE,
            HarnessError::Step(_) => EXIT_ALL_DIVERGED,
            HarnessError::Io(_) | HarnessError::Spectral(_) => 1,
        }
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Convergence(ConvergenceOutcome),
    Conservation(Vec<DriftSeries>),
    Symplecticity(Vec<DriftSeries>),
    Sweep(SweepOutcome),
    Solve(SolveOutcome),
}

/// Result of one experiment together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub metadata: Metadata,
    pub outcome: Outcome,
}

/// Runs the driver selected by `cfg.kind`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunResult, HarnessError> {
    let outcome = match cfg.kind {
        ExperimentKind::Converge => Outcome::Convergence(run_convergence(cfg)?),
        ExperimentKind::Conserve => Outcome::Conservation(run_conservation(cfg)?),
        ExperimentKind::Symplecticity => Outcome::Symplecticity(run_symplecticity(cfg)?),
        ExperimentKind::ResonanceSweep => Outcome::Sweep(run_resonance_sweep(cfg)?),
        ExperimentKind::Solve => Outcome::Solve(run_solve(cfg)?),
    };
    Ok(RunResult {
        metadata: Metadata::new(cfg),
        outcome,
    })
}

fn drift_table(series: &[DriftSeries], columns: &[&'static str]) -> Table {
    let mut header = vec!["method", "time"];
    header.extend_from_slice(columns);
    header.push("status");
    let mut t = Table::new(&header);
    for s in series {
        for p in &s.samples {
            let mut row = vec![s.method.to_string(), fmt_f64(p.time)];
            row.extend(p.errors[..columns.len()].iter().map(|e| fmt_f64(*e)));
            row.push(Status::Ok.name().into());
            t.push(row);
        }
        if let Some((time, _)) = &s.failure {
            let mut row = vec![s.method.to_string(), fmt_f64(*time)];
            row.extend(columns.iter().map(|_| String::new()));
            row.push(Status::Diverged.name().into());
            t.push(row);
        }
    }
    t
}

impl RunResult {
    pub fn table(&self) -> Table {
        match &self.outcome {
            Outcome::Convergence(c) => {
                let mut t = Table::new(&["method", "tau", "h1_error", "wall_time_s", "fp_iter_mean", "status"]);
                for r in &c.rows {
                    t.push(vec![
                        r.method.to_string(),
                        fmt_f64(r.tau),
                        opt(r.h1_error),
                        fmt_f64(r.wall_time_s),
                        opt(r.fp_iter_mean),
                        r.status.name().into(),
                    ]);
                }
                t
            }
            Outcome::Conservation(s) => drift_table(s, &["momentum_err", "hamiltonian_err"]),
            Outcome::Symplecticity(s) => drift_table(s, &["pairing_err"]),
            Outcome::Sweep(s) => {
                let mut t = Table::new(&["tau", "max_hamiltonian_err", "status"]);
                for r in &s.rows {
                    t.push(vec![fmt_f64(r.tau), opt(r.max_hamiltonian_err), r.status.name().into()]);
                }
                t
            }
            Outcome::Solve(s) => {
                let mut t = Table::new(&DiagnosticsRecord::CSV_HEADER);
                for r in &s.series {
                    t.push(r.csv_fields());
                }
                t
            }
        }
    }

    /// True when no method produced a usable result.
    pub fn all_diverged(&self) -> bool {
        match &self.outcome {
            Outcome::Convergence(c) => c.rows.iter().all(|r| r.status == Status::Diverged),
            Outcome::Conservation(s) | Outcome::Symplecticity(s) => {
                s.iter().all(|x| x.status == Status::Diverged)
            }
            Outcome::Sweep(s) => s.rows.iter().all(|r| r.status == Status::Diverged),
            Outcome::Solve(_) => false,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_diverged() {
            EXIT_ALL_DIVERGED
        } else {
            0
        }
    }

    /// Key metrics on one line.
    pub fn summary(&self) -> String {
        let kind = self.metadata.config.kind.name();
        let body = match &self.outcome {
            Outcome::Convergence(c) => {
                let fits: Vec<String> = c
                    .fits
                    .iter()
                    .map(|f| match f.fit {
                        Some(fit) => format!("{} slope {:.3} ({} pts)", f.method, fit.slope, fit.points),
                        None => format!("{} slope n/a", f.method),
                    })
                    .collect();
                format!("{}; reference floor {:.2e}", fits.join(", "), c.reference_floor)
            }
            Outcome::Conservation(s) => drift_summary(s, &["max|dI0|", "max|dI1|"]),
            Outcome::Symplecticity(s) => drift_summary(s, &["max|dω|"]),
            Outcome::Sweep(s) => {
                let slope = s
                    .analysis
                    .envelope_fit
                    .map(|f| format!("{:.3}", f.slope))
                    .unwrap_or_else(|| "n/a".into());
                let diverged = s.rows.iter().filter(|r| r.status == Status::Diverged).count();
                format!(
                    "{} step sizes, envelope slope {slope}, {} spikes, {diverged} diverged",
                    s.rows.len(),
                    s.analysis.spikes.len()
                )
            }
            Outcome::Solve(s) => {
                let first = &s.series[0];
                let last = s.series.last().expect("series starts with the initial record");
                format!(
                    "{} steps of {} to t = {}, |dI0| {:.2e}, |dI1| {:.2e}",
                    s.steps,
                    s.method,
                    last.time,
                    (last.momentum - first.momentum).abs(),
                    (last.hamiltonian - first.hamiltonian).abs()
                )
            }
        };
        format!("{kind}: {body}")
    }

    /// Writes the table to `path`, metadata to `<stem>.meta.json` and, for
    /// solve runs, the final state to `<stem>.state.txt`. Returns the paths
    /// written.
    pub fn write(&self, path: &Path) -> Result<Vec<PathBuf>, HarnessError> {
        output::write_file(path, &self.table().to_csv())?;
        let meta = sibling(path, "meta.json");
        let json = serde_json::to_string_pretty(&self.metadata).expect("metadata serializes");
        output::write_file(&meta, &(json + "\n"))?;
        let mut written = vec![path.to_path_buf(), meta];
        if let Outcome::Solve(s) = &self.outcome {
            let state = sibling(path, "state.txt");
            output::write_file(&state, &format_state(&s.final_state))?;
            written.push(state);
        }
        Ok(written)
    }
}

fn drift_summary(series: &[DriftSeries], labels: &[&str]) -> String {
    series
        .iter()
        .map(|s| {
            let metrics: Vec<String> = labels
                .iter()
                .zip(s.max_errors)
                .map(|(l, e)| format!("{l} {e:.2e}"))
                .collect();
            match &s.failure {
                Some((t, _)) => format!("{} diverged at t = {t}", s.method),
                None => format!(
                    "{} {} ({:.1} fp iters/step)",
                    s.method,
                    metrics.join(" "),
                    s.mean_fp_iterations
                ),
            }
        })
        .collect::<Vec<_>>()
        .join("; ")
}
