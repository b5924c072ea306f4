use kdv_core::spectral::{
    antiderivative, derivative, free_flow, pointwise_square, sobolev_norm, to_physical,
    to_physical_with_residue, to_spectral,
};
use kdv_core::{random_rough, GridSpec, RoughDataSpec, SobolevIndex, SpectralState};
use num_complex::Complex64;
use proptest::prelude::*;

/// Random invariant-satisfying state with coefficients bounded by `amp`.
fn state_strategy(m: usize, amp: f64) -> impl Strategy<Value = SpectralState> {
    let n = m / 2 - 1;
    prop::collection::vec((-amp..amp, -amp..amp), n).prop_map(move |v| {
        let g = GridSpec::new(m).unwrap();
        let modes: Vec<(i64, Complex64)> = v
            .into_iter()
            .enumerate()
            .map(|(i, (re, im))| (i as i64 + 1, Complex64::new(re, im)))
            .collect();
        SpectralState::from_modes(g, &modes).unwrap()
    })
}

fn l2_dist(a: &SpectralState, b: &SpectralState) -> f64 {
    sobolev_norm(&a.checked_sub(b).unwrap(), SobolevIndex::L2)
}

/// `Σ_m û_m e^{i m x_j}` summed directly, with the mode set `{-M/2+1..M/2}`.
fn direct_samples(u: &SpectralState) -> Vec<Complex64> {
    let g = u.grid();
    g.points()
        .iter()
        .map(|&x| {
            (0..g.modes())
                .map(|k| u.coeffs()[k] * Complex64::from_polar(1.0, g.mode_of(k) as f64 * x))
                .sum()
        })
        .collect()
}

/// Aliased collocation square: `(û²)_m = Σ_{a+b ≡ m mod M} û_a û_b`, mean removed.
fn aliased_square_oracle(u: &SpectralState) -> Vec<Complex64> {
    let g = u.grid();
    let m = g.modes();
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for ka in 0..m {
        for kb in 0..m {
            let a = g.mode_of(ka);
            let b = g.mode_of(kb);
            let k = g.slot_of(g.wrap(a + b)).unwrap();
            out[k] += u.coeffs()[ka] * u.coeffs()[kb];
        }
    }
    out[0] = Complex64::new(0.0, 0.0);
    out[m / 2] = Complex64::new(0.0, 0.0);
    out
}

/// Exact (non-wrapped) square truncated to the grid's mode set.
fn exact_square_oracle(u: &SpectralState) -> Vec<Complex64> {
    let g = u.grid();
    let m = g.modes();
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for ka in 0..m {
        for kb in 0..m {
            let s = g.mode_of(ka) + g.mode_of(kb);
            if s != 0 && s.abs() < g.nyquist() {
                out[g.slot_of(s).unwrap()] += u.coeffs()[ka] * u.coeffs()[kb];
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip_small(u in state_strategy(8, 1.0)) {
        let back = to_spectral(u.grid(), &to_physical(&u)).unwrap();
        prop_assert!(l2_dist(&back, &u) < 1e-13);
    }

    #[test]
    fn round_trip_medium(u in state_strategy(32, 1.0)) {
        let back = to_spectral(u.grid(), &to_physical(&u)).unwrap();
        prop_assert!(l2_dist(&back, &u) < 1e-13);
    }

    #[test]
    fn round_trip_large(u in state_strategy(512, 0.1)) {
        let back = to_spectral(u.grid(), &to_physical(&u)).unwrap();
        prop_assert!(l2_dist(&back, &u) < 1e-13);
    }

    #[test]
    fn samples_match_direct_sum(u in state_strategy(32, 1.0)) {
        let (fast, residue) = to_physical_with_residue(&u);
        prop_assert!(residue < 1e-12);
        for (f, d) in fast.iter().zip(direct_samples(&u)) {
            prop_assert!((f - d.re).abs() < 1e-12);
            prop_assert!(d.im.abs() < 1e-12);
        }
    }

    #[test]
    fn free_flow_is_an_isometry(u in state_strategy(64, 1.0), t in -10.0f64..10.0) {
        let f = free_flow(&u, t);
        for s in [0.0, 1.0, 2.0, 3.0] {
            let s = SobolevIndex::new(s).unwrap();
            let (a, b) = (sobolev_norm(&f, s), sobolev_norm(&u, s));
            prop_assert!((a - b).abs() <= 1e-13 * b.max(1.0));
        }
        prop_assert_eq!(f.coeff(0), Complex64::new(0.0, 0.0));
        for m in 1..32 {
            prop_assert_eq!(f.coeff(-m), f.coeff(m).conj());
        }
    }

    #[test]
    fn free_flow_composes(u in state_strategy(16, 1.0), t1 in -1.0f64..1.0, t2 in -1.0f64..1.0) {
        let two = free_flow(&free_flow(&u, t1), t2);
        let one = free_flow(&u, t1 + t2);
        prop_assert!(l2_dist(&two, &one) < 1e-12);
    }

    #[test]
    fn free_flow_composes_on_rough_data(seed in any::<u64>(), t1 in -1.0f64..1.0, t2 in -1.0f64..1.0) {
        let u = random_rough(&RoughDataSpec::new(512, 2.0, seed).unwrap()).unwrap();
        let two = free_flow(&free_flow(&u, t1), t2);
        let one = free_flow(&u, t1 + t2);
        prop_assert!(l2_dist(&two, &one) < 1e-12);
    }

    #[test]
    fn aliased_square_matches_triple_sum(u in state_strategy(64, 1.0)) {
        let fast = pointwise_square(&u, false);
        let oracle = aliased_square_oracle(&u);
        for (a, b) in fast.coeffs().iter().zip(&oracle) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn dealiased_square_is_the_truncated_convolution(u in state_strategy(32, 1.0)) {
        let fast = pointwise_square(&u, true);
        let oracle = exact_square_oracle(&u);
        for (a, b) in fast.coeffs().iter().zip(&oracle) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_inverts_antiderivative(u in state_strategy(64, 1.0)) {
        let back = derivative(&antiderivative(&u).unwrap(), 1);
        prop_assert!(l2_dist(&back, &u) < 1e-13);
        let back = antiderivative(&derivative(&u, 1)).unwrap();
        prop_assert!(l2_dist(&back, &u) < 1e-13);
    }

    #[test]
    fn antiderivative_shifts_sobolev_index(u in state_strategy(64, 1.0), s in 0.0f64..3.0) {
        let a = sobolev_norm(&antiderivative(&u).unwrap(), SobolevIndex::new(s + 1.0).unwrap());
        let b = sobolev_norm(&u, SobolevIndex::new(s).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
    }

    #[test]
    fn derivative_orders_compose(u in state_strategy(32, 1.0)) {
        let twice = derivative(&derivative(&u, 1), 1);
        prop_assert!(l2_dist(&twice, &derivative(&u, 2)) < 1e-12);
    }
}

#[test]
fn aliasing_only_touches_high_modes() {
    // Input supported on |m| <= 10 at M = 32: the wrapped convolution differs
    // from the exact one only where |a + b| >= 16, which folds into |m| > 32/2 - 10.
    let g = GridSpec::new(32).unwrap();
    let modes: Vec<(i64, Complex64)> = (1..=10)
        .map(|m| (m, Complex64::new(1.0 / m as f64, 0.5 / (m * m) as f64)))
        .collect();
    let u = SpectralState::from_modes(g, &modes).unwrap();
    let aliased = pointwise_square(&u, false);
    let dealiased = pointwise_square(&u, true);
    for k in 0..32 {
        let m = g.mode_of(k);
        let d = (aliased.coeffs()[k] - dealiased.coeffs()[k]).norm();
        if m.abs() <= 16 - 10 {
            assert!(d < 1e-14, "mode {m}: {d}");
        }
    }
    assert!(l2_dist(&aliased, &dealiased) > 1e-3);
}
