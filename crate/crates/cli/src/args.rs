use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use kdv_core::harness::{DataSpec, ExperimentConfig, ExperimentKind, FpTol};
use kdv_core::Method;

#[derive(Debug, Parser)]
#[command(name = "kdv", about = "Periodic KdV integrators and experiment drivers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one trajectory and dump diagnostics plus the final state.
    Solve(RunArgs),
    /// Convergence-order study against a fine reference solution.
    Converge(RunArgs),
    /// Long-time momentum and Hamiltonian drift.
    Conserve(RunArgs),
    /// Drift of the symplectic pairing along two trajectories.
    Symplectic(RunArgs),
    /// Maximal Hamiltonian error over a dense set of step sizes.
    Sweep(RunArgs),
}

impl Command {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Command::Solve(_) => ExperimentKind::Solve,
            Command::Converge(_) => ExperimentKind::Converge,
            Command::Conserve(_) => ExperimentKind::Conserve,
            Command::Symplectic(_) => ExperimentKind::Symplecticity,
            Command::Sweep(_) => ExperimentKind::ResonanceSweep,
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Solve(a)
            | Command::Converge(a)
            | Command::Conserve(a)
            | Command::Symplectic(a)
            | Command::Sweep(a) => a,
        }
    }
}

/// Flags override the values of `--config`; without a file, `--M`, `--T`, a
/// step size and the initial data are required.
#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of Fourier modes (even).
    #[arg(long = "M")]
    pub modes: Option<usize>,
    /// Single step size.
    #[arg(long, conflicts_with = "taus")]
    pub tau: Option<f64>,
    /// Comma-separated step sizes.
    #[arg(long, alias = "tau-grid", value_delimiter = ',')]
    pub taus: Option<Vec<f64>>,
    /// Final time; negative values run a solve backward.
    #[arg(long = "T", allow_negative_numbers = true)]
    pub t_final: Option<f64>,
    /// Decay exponent of the random initial data.
    #[arg(long, conflicts_with_all = ["smooth", "state"])]
    pub theta: Option<f64>,
    /// Seed of the random initial data [default: 1].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Start from the smooth profile instead of random data.
    #[arg(long, conflicts_with = "state")]
    pub smooth: bool,
    /// Start from a state file written by `solve`.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Comma-separated methods: symplectic, explicit_resonance, symmetric_lawson.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,
    /// Pad products to suppress aliasing.
    #[arg(long)]
    pub dealias: bool,
    /// Reference step of a convergence study.
    #[arg(long)]
    pub ref_tau: Option<f64>,
    /// Fixed-point tolerance: tau4, machine or a number.
    #[arg(long)]
    pub fp_tol: Option<FpTol>,
    #[arg(long)]
    pub fp_max_iters: Option<usize>,
    /// Sample every n-th step.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Seed of the second trajectory of a symplecticity run.
    #[arg(long)]
    pub pair_seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Directory for outputs when no path is given.
    #[arg(long, env = "KDV_OUTPUT_DIR", default_value = ".")]
    pub output_dir: PathBuf,
}

/// A missing or inconsistent flag; reported with usage text.
#[derive(Debug)]
pub struct UsageError(pub String);

fn missing(flag: &str) -> UsageError {
    UsageError(format!("missing required flag {flag} (or pass --config)"))
}

/// Merges the optional config file with the flags.
pub fn build_config(kind: ExperimentKind, a: &RunArgs) -> Result<ExperimentConfig, UsageError> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| UsageError(e.to_string()))?,
        None => {
            let modes = a.modes.ok_or_else(|| missing("--M"))?;
            let t_final = a.t_final.ok_or_else(|| missing("--T"))?;
            if kind != ExperimentKind::ResonanceSweep && a.tau.is_none() && a.taus.is_none() {
                return Err(missing("--taus or --tau"));
            }
            if a.theta.is_none() && !a.smooth && a.state.is_none() {
                return Err(missing("--theta (or --smooth / --state)"));
            }
            ExperimentConfig::new(kind, modes, DataSpec::Zero, Vec::new(), t_final)
        }
    };
    cfg.kind = kind;
    if let Some(m) = a.modes {
        cfg.modes = m;
    }
    if let Some(t) = a.t_final {
        cfg.t_final = t;
    }
    if let Some(tau) = a.tau {
        cfg.tau_grid = vec![tau];
    }
    if let Some(taus) = &a.taus {
        cfg.tau_grid = taus.clone();
    }
    if a.smooth {
        cfg.data = DataSpec::Smooth;
    } else if let Some(path) = &a.state {
        cfg.data = DataSpec::StateFile { path: path.clone() };
    } else if let Some(theta) = a.theta {
        let seed = a.seed.or(cfg.seed()).unwrap_or(1);
        cfg.data = DataSpec::Rough { theta, seed };
    } else if let Some(seed) = a.seed {
        match &mut cfg.data {
            DataSpec::Rough { seed: s, .. } => *s = seed,
            _ => return Err(UsageError("--seed needs random initial data (--theta)".into())),
        }
    }
    if let Some(methods) = &a.methods {
        cfg.methods = methods.clone();
    }
    if a.dealias {
        cfg.dealias = true;
    }
    if a.ref_tau.is_some() {
        cfg.ref_tau = a.ref_tau;
    }
    if a.fp_tol.is_some() {
        cfg.fp_tol = a.fp_tol;
    }
    if let Some(n) = a.fp_max_iters {
        cfg.fp_max_iters = n;
    }
    if a.stride.is_some() {
        cfg.stride = a.stride;
    }
    if a.pair_seed.is_some() {
        cfg.pair_seed = a.pair_seed;
    }
    if let Some(out) = &a.output {
        cfg.output_path = out.clone();
    } else if cfg.output_path.as_os_str().is_empty() {
        cfg.output_path = a.output_dir.join(format!("{}.csv", kind.name()));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(argv: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("kdv").chain(argv.iter().copied())).unwrap()
    }

    #[test]
    fn flags_build_a_config() {
        let cli = parse(&["converge", "--M", "64", "--theta", "5.5", "--T", "0.5", "--taus", "0.1,0.05", "--methods", "symplectic,explicit"]);
        let cfg = build_config(cli.command.kind(), cli.command.args()).unwrap();
        assert_eq!(cfg.modes, 64);
        assert_eq!(cfg.tau_grid, vec![0.1, 0.05]);
        assert_eq!(cfg.methods, vec![Method::Symplectic, Method::ExplicitResonance]);
        assert_eq!(cfg.data, DataSpec::Rough { theta: 5.5, seed: 1 });
        assert!(cfg.output_path.ends_with("converge.csv"));
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn missing_flags_are_reported() {
        let cli = parse(&["converge", "--M", "64", "--T", "1"]);
        assert!(build_config(cli.command.kind(), cli.command.args()).is_err());
        let cli = parse(&["sweep", "--M", "64", "--T", "1"]);
        assert!(build_config(cli.command.kind(), cli.command.args()).is_err());
        let cli = parse(&["sweep", "--M", "64", "--T", "1", "--smooth"]);
        assert!(build_config(cli.command.kind(), cli.command.args()).is_ok());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        let base = ExperimentConfig::new(
            ExperimentKind::Conserve,
            32,
            DataSpec::Rough { theta: 3.5, seed: 4 },
            vec![0.05],
            10.0,
        );
        std::fs::write(&path, base.to_json()).unwrap();
        let p = path.to_str().unwrap();
        let cli = parse(&["conserve", "--config", p, "--T", "2", "--seed", "9"]);
        let cfg = build_config(cli.command.kind(), cli.command.args()).unwrap();
        assert_eq!(cfg.t_final, 2.0);
        assert_eq!(cfg.data, DataSpec::Rough { theta: 3.5, seed: 9 });
        assert_eq!(cfg.modes, 32);
    }
}
