//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//! Tables are written under the cargo target tmpdir for plotting.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use kdv_core::harness::{
    run, DataSpec, ExperimentConfig, ExperimentKind, Outcome, RunResult, Status, MACHINE_FP_TOL,
};
use kdv_core::integrators::evolve;
use kdv_core::{
    canonical_pairing, direct_fourier_step, h_error, random_rough, symplectic_resonance_step,
    IntegratorConfig, Method, RoughDataSpec, SobolevIndex, SpectralState, Stepper,
};

struct Line {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn rough(m: usize, theta: f64, seed: u64) -> SpectralState {
    random_rough(&RoughDataSpec::new(m, theta, seed).unwrap()).unwrap()
}

fn out_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance")
}

fn execute(cfg: &ExperimentConfig, file: &str) -> Result<RunResult, String> {
    let result = run(cfg).map_err(|e| e.to_string())?;
    result.write(&out_dir().join(file)).map_err(|e| e.to_string())?;
    Ok(result)
}

fn oracle_equivalence() -> Vec<Line> {
    let mut worst: f64 = 0.0;
    for m in [16, 32, 64] {
        for tau in [0.1, 0.01] {
            let cfg = IntegratorConfig::new(tau).unwrap().with_fp_tol(1e-15);
            for seed in 0..20 {
                let u = rough(m, 3.5, seed);
                let fast = symplectic_resonance_step(&u, &cfg).unwrap().state;
                let slow = direct_fourier_step(&u, &cfg).unwrap();
                worst = worst.max(h_error(&fast, &slow, SobolevIndex::L2).unwrap());
            }
        }
    }
    vec![Line {
        name: "oracle equivalence (120 cases, L2 < 1e-11)",
        pass: worst < 1e-11,
        detail: format!("max L2 difference {worst:.2e}"),
    }]
}

fn dyadic_taus() -> Vec<f64> {
    (4..=10).map(|k| 2f64.powi(-k)).collect()
}

fn convergence(theta: f64, methods: Vec<Method>, file: &str) -> Result<kdv_core::harness::ConvergenceOutcome, String> {
    let mut cfg = ExperimentConfig::new(
        ExperimentKind::Converge,
        512,
        DataSpec::Rough { theta, seed: 1 },
        dyadic_taus(),
        1.0,
    );
    cfg.methods = methods;
    match execute(&cfg, file)?.outcome {
        Outcome::Convergence(c) => Ok(c),
        _ => unreachable!(),
    }
}

fn slope_line(name: &'static str, slope: Option<f64>, ok: impl Fn(f64) -> bool, floor: f64) -> Line {
    match slope {
        Some(s) => Line {
            name,
            pass: ok(s),
            detail: format!("fitted H1 slope {s:.3}, reference floor {floor:.1e}"),
        },
        None => Line {
            name,
            pass: false,
            detail: "no slope could be fitted".into(),
        },
    }
}

fn smooth_convergence() -> Vec<Line> {
    let name = "second order at theta = 5.5 (slope in [1.75, 2.25])";
    match convergence(5.5, vec![Method::Symplectic], "converge_theta5.5.csv") {
        Ok(c) => vec![slope_line(
            name,
            c.fit(Method::Symplectic).map(|f| f.slope),
            |s| (1.75..=2.25).contains(&s),
            c.reference_floor,
        )],
        Err(e) => vec![Line { name, pass: false, detail: e }],
    }
}

fn rough_convergence() -> Vec<Line> {
    let names = [
        "first-order floor at theta = 3.5 (symplectic slope >= 0.9)",
        "explicit comparator at theta = 3.5 (slope in [0.75, 1.25])",
    ];
    match convergence(3.5, vec![Method::Symplectic, Method::ExplicitResonance], "converge_theta3.5.csv") {
        Ok(c) => vec![
            slope_line(names[0], c.fit(Method::Symplectic).map(|f| f.slope), |s| s >= 0.9, c.reference_floor),
            slope_line(
                names[1],
                c.fit(Method::ExplicitResonance).map(|f| f.slope),
                |s| (0.75..=1.25).contains(&s),
                c.reference_floor,
            ),
        ],
        Err(e) => names.iter().map(|&name| Line { name, pass: false, detail: e.clone() }).collect(),
    }
}

fn conservation() -> Vec<Line> {
    let names = [
        "momentum conservation (symplectic, T = 500, max |dI0| < 1e-10)",
        "fixed-point iterations (max <= 30, mean in [5, 25])",
        "Lawson diverges before T = 500, resonance methods complete",
    ];
    let mut cfg = ExperimentConfig::new(
        ExperimentKind::Conserve,
        512,
        DataSpec::Rough { theta: 3.5, seed: 1 },
        vec![0.05],
        500.0,
    );
    cfg.methods = Method::ALL.to_vec();
    let series = match execute(&cfg, "conserve.csv") {
        Ok(RunResult { outcome: Outcome::Conservation(s), .. }) => s,
        Ok(_) => unreachable!(),
        Err(e) => return names.iter().map(|&name| Line { name, pass: false, detail: e.clone() }).collect(),
    };
    let get = |m: Method| series.iter().find(|s| s.method == m).expect("every method ran");
    let sym = get(Method::Symplectic);
    let exp = get(Method::ExplicitResonance);
    let law = get(Method::SymmetricLawson);
    let sym_ok = sym.status == Status::Ok;
    vec![
        Line {
            name: names[0],
            pass: sym_ok && sym.max_errors[0] < 1e-10,
            detail: format!(
                "max |dI0| {:.2e} over {} steps, max |dI1| {:.2e}",
                sym.max_errors[0], sym.steps_completed, sym.max_errors[1]
            ),
        },
        Line {
            name: names[1],
            pass: sym_ok && sym.max_fp_iterations <= 30 && (5.0..=25.0).contains(&sym.mean_fp_iterations),
            detail: format!("max {}, mean {:.2}", sym.max_fp_iterations, sym.mean_fp_iterations),
        },
        Line {
            name: names[2],
            pass: law.status == Status::Diverged && sym_ok && exp.status == Status::Ok,
            detail: format!(
                "lawson {} at t = {}, symplectic {}, explicit {} (explicit max |dI0| {:.2e})",
                law.status.name(),
                law.failure.as_ref().map(|f| format!("{:.2}", f.0)).unwrap_or_else(|| "-".into()),
                sym.status.name(),
                exp.status.name(),
                exp.max_errors[0],
            ),
        },
    ]
}

/// Relative drift of the canonical form on finite-difference tangent vectors.
fn tangent_drift(u: &SpectralState, steps: usize) -> f64 {
    let (a, b) = (rough(u.grid().modes(), 3.5, 101), rough(u.grid().modes(), 3.5, 102));
    let eps = 1e-6;
    let cfg = IntegratorConfig::new(0.05).unwrap().with_fp_tol(MACHINE_FP_TOL);
    let t = steps as f64 * 0.05;
    let flow = |x: &SpectralState| evolve(x, Method::Symplectic, &cfg, t, &mut []).unwrap().final_state;
    let base = flow(u);
    let da = flow(&(u + &a.scaled(eps))).checked_sub(&base).unwrap().scaled(1.0 / eps);
    let db = flow(&(u + &b.scaled(eps))).checked_sub(&base).unwrap().scaled(1.0 / eps);
    let before = canonical_pairing(&a, &b).unwrap();
    (canonical_pairing(&da, &db).unwrap() - before).norm() / before.norm()
}

fn symplecticity() -> Vec<Line> {
    let name = "pairing conservation (two trajectories, 1000 steps, |d omega| < 1e-10)";
    let cfg = ExperimentConfig::new(
        ExperimentKind::Symplecticity,
        512,
        DataSpec::Rough { theta: 3.5, seed: 1 },
        vec![0.05],
        50.0,
    );
    let mut lines = match execute(&cfg, "symplectic.csv") {
        Ok(RunResult { outcome: Outcome::Symplecticity(s), .. }) => {
            let s = &s[0];
            vec![Line {
                name,
                pass: s.status == Status::Ok && s.max_errors[0] < 1e-10,
                detail: format!("max |d omega| {:.2e} over {} steps", s.max_errors[0], s.steps_completed),
            }]
        }
        Ok(_) => unreachable!(),
        Err(detail) => vec![Line { name, pass: false, detail }],
    };
    let drift = tangent_drift(&cfg.initial_state().unwrap(), 1000);
    lines.push(Line {
        name: "(info) canonical form on tangent vectors, 1000 steps",
        pass: true,
        detail: format!("relative drift {drift:.2e} at eps = 1e-6"),
    });
    lines
}

fn time_symmetry() -> Vec<Line> {
    let fp_tol = 1e-12;
    let mut worst: f64 = 0.0;
    for case in 0..50u64 {
        let m = [16, 64, 256, 512][case as usize % 4];
        let tau = [0.1, 0.05, 0.01][(case as usize / 4) % 3];
        let u = rough(m, 3.5, 1000 + case);
        let cfg = IntegratorConfig::new(tau).unwrap().with_fp_tol(fp_tol);
        let mut fwd = Stepper::new(Method::Symplectic, u.grid(), cfg).unwrap();
        let mut bwd = Stepper::new(Method::Symplectic, u.grid(), cfg.reversed()).unwrap();
        let there = fwd.step(&u).unwrap().state;
        let back = bwd.step(&there).unwrap().state;
        worst = worst.max(h_error(&back, &u, SobolevIndex::L2).unwrap());
    }
    vec![Line {
        name: "time symmetry (50 cases, L2 <= 4 fp_tol)",
        pass: worst <= 4.0 * fp_tol,
        detail: format!("max L2 round-trip error {worst:.2e} with fp_tol {fp_tol:.0e}"),
    }]
}

fn sweep() -> Vec<Line> {
    let name = "resonant-timestep sweep (envelope slope in [1.6, 2.4], >= 1 spike)";
    let cfg = ExperimentConfig::new(
        ExperimentKind::ResonanceSweep,
        256,
        DataSpec::Rough { theta: 3.5, seed: 1 },
        Vec::new(),
        100.0,
    );
    match execute(&cfg, "sweep.csv") {
        Ok(RunResult { outcome: Outcome::Sweep(s), .. }) => {
            let slope = s.analysis.envelope_fit.map(|f| f.slope);
            let spikes: Vec<String> = s.analysis.spikes.iter().take(5).map(|&i| format!("{:.4}", s.rows[i].tau)).collect();
            vec![Line {
                name,
                pass: slope.is_some_and(|x| (1.6..=2.4).contains(&x)) && !s.analysis.spikes.is_empty(),
                detail: format!(
                    "{} step sizes, slope {}, {} spikes (first at tau = {})",
                    s.rows.len(),
                    slope.map(|x| format!("{x:.3}")).unwrap_or_else(|| "n/a".into()),
                    s.analysis.spikes.len(),
                    spikes.join(", ")
                ),
            }]
        }
        Ok(_) => unreachable!(),
        Err(detail) => vec![Line { name, pass: false, detail }],
    }
}

fn main() -> ExitCode {
    let checks: [fn() -> Vec<Line>; 7] = [
        oracle_equivalence,
        smooth_convergence,
        rough_convergence,
        conservation,
        symplecticity,
        time_symmetry,
        sweep,
    ];
    let mut failed = 0;
    let start = Instant::now();
    for check in checks {
        let t = Instant::now();
        let lines = check();
        let secs = t.elapsed().as_secs_f64();
        for line in lines {
            let tag = if line.pass { "PASS" } else { "FAIL" };
            println!("{tag}  {}: {} [{secs:.1} s]", line.name, line.detail);
            failed += usize::from(!line.pass);
        }
    }
    println!(
        "acceptance: {failed} failed, total {:.1} s, tables in {}",
        start.elapsed().as_secs_f64(),
        out_dir().display()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
