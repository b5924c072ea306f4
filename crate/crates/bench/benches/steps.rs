use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use kdv_core::harness::MACHINE_FP_TOL;
use kdv_core::spectral::{pointwise_square, to_physical};
use kdv_core::{random_rough, smooth_profile, IntegratorConfig, Method, RoughDataSpec, Stepper};

fn steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("step_m512_tau0.05");
    let rough = random_rough(&RoughDataSpec::new(512, 3.5, 1).unwrap()).unwrap();
    // Lawson's fixed point does not converge on rough data at this step.
    let smooth = smooth_profile(512).unwrap();
    let cfg = IntegratorConfig::new(0.05).unwrap().with_fp_tol(MACHINE_FP_TOL);
    for method in Method::ALL {
        let u = if method == Method::SymmetricLawson { &smooth } else { &rough };
        let mut stepper = Stepper::new(method, u.grid(), cfg).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(method), u, |b, u| {
            b.iter(|| stepper.step(black_box(u)).unwrap())
        });
    }
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let u = random_rough(&RoughDataSpec::new(512, 3.5, 1).unwrap()).unwrap();
    c.bench_function("to_physical_m512", |b| b.iter(|| to_physical(black_box(&u))));
    c.bench_function("square_m512_aliased", |b| b.iter(|| pointwise_square(black_box(&u), false)));
    c.bench_function("square_m512_dealiased", |b| b.iter(|| pointwise_square(black_box(&u), true)));
}

criterion_group!(benches, steps, kernels);
criterion_main!(benches);
