use levyrd_core::diagnostics::{skorohod_distance, uniform_distance};
use levyrd_core::gate::{check_claim_spectral, check_ex01};
use levyrd_core::prm::sample_prm;
use levyrd_core::solver::simulate_mc;
use levyrd_core::spectral::norms::{frac_power_apply, semigroup_apply};
use levyrd_core::{
    DiffusionSpec, DriftSpec, GridScheme, LevyMeasure, McOptions, NoiseSpec, NormKind, PathRecord, SpectralField,
    SpectralNoiseSpec, SpectralOperator,
};
use proptest::prelude::*;

fn field(n: usize) -> impl Strategy<Value = SpectralField> {
    prop::collection::vec(-5.0f64..5.0, n).prop_map(SpectralField::new)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

/// Step path on `[0, 1]` with 1 to 5 knots and 2 modes.
fn step_path() -> impl Strategy<Value = PathRecord> {
    (prop::collection::vec(0.01f64..0.99, 0..5), prop::collection::vec(-2.0f64..2.0, 12)).prop_map(|(mut cuts, vals)| {
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut times = vec![0.0];
        times.extend(cuts);
        let mut states: Vec<SpectralField> =
            (0..times.len()).map(|k| SpectralField::new(vec![vals[2 * k], vals[2 * k + 1]])).collect();
        times.push(1.0);
        states.push(states.last().unwrap().clone());
        PathRecord::from_samples(times, states).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semigroup_composes(u in field(12), t in 0.0f64..0.05, s in 0.0f64..0.05) {
        let op = SpectralOperator::dirichlet_laplacian(12).unwrap();
        let once = semigroup_apply(&op, t + s, &u).unwrap();
        let twice = semigroup_apply(&op, t, &semigroup_apply(&op, s, &u).unwrap()).unwrap();
        for (a, b) in once.coeffs().iter().zip(twice.coeffs()) {
            prop_assert!((a - b).abs() <= 1e-14 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn semigroup_contracts(u in field(12), t in 0.0f64..1.0, p in 1.0f64..4.0) {
        let op = SpectralOperator::dirichlet_laplacian(12).unwrap();
        prop_assert!(semigroup_apply(&op, t, &u).unwrap().lp(p) <= u.lp(p));
    }

    #[test]
    fn smoothing_rate(alpha in 0.0f64..=1.0, t in 1e-4f64..1.0, i in 0usize..64) {
        let op = SpectralOperator::dirichlet_laplacian(64).unwrap();
        let bound = if alpha == 0.0 { 1.0 } else { (alpha / std::f64::consts::E).powf(alpha) * t.powf(-alpha) };
        let v = frac_power_apply(&op, alpha, &semigroup_apply(&op, t, &op.unit(i)).unwrap());
        prop_assert!(v.coeffs()[i] <= bound * (1.0 + 1e-12));
        let scan = op.eigenvalues().iter().map(|r| r.powf(alpha) * (-r * t).exp()).fold(0.0, f64::max);
        prop_assert!(scan <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn norms_are_homogeneous_and_subadditive(
        u in field(8),
        v in field(8),
        c in -4.0f64..4.0,
        kind_ix in 0usize..4,
        p in 1.0f64..3.0,
        delta in 0.05f64..0.95,
    ) {
        let op = SpectralOperator::dirichlet_laplacian(8).unwrap();
        let kind = match kind_ix {
            0 => NormKind::B { p },
            1 => NormKind::E { delta, p },
            2 => NormKind::X { delta, theta: 0.5, p },
            _ => NormKind::Sup,
        };
        let nu = kind.eval(&op, &u);
        prop_assert!(close(kind.eval(&op, &u.scale(c)), c.abs() * nu, 1e-12));
        let mut sum = u.clone();
        sum.axpy(1.0, &v);
        prop_assert!(kind.eval(&op, &sum) <= (nu + kind.eval(&op, &v)) * (1.0 + 1e-12));
    }

    #[test]
    fn polynomial_drift_is_sign_dissipative(u in -1e3f64..1e3, q in 1.0f64..5.0) {
        let d = DriftSpec::poly(q, 0.0);
        prop_assert!(d.f(u) * u <= 0.0);
    }

    #[test]
    fn truncations_are_bounded_and_consistent(u in -20.0f64..20.0, n in 1u32..12, beta in 0.0f64..3.0) {
        let base = DriftSpec::poly(3.0, beta);
        let spec = base.clone().truncated(n);
        prop_assert!(spec.scalar(u).abs() <= spec.truncation_bound() * (1.0 + 1e-12));
        if u.abs() <= n as f64 {
            prop_assert_eq!(spec.scalar(u), base.f(u));
        }
    }

    #[test]
    fn skorohod_is_a_pseudo_metric(x in step_path(), y in step_path(), z in step_path()) {
        let d = |a: &PathRecord, b: &PathRecord| skorohod_distance(a, b, 64).unwrap();
        let (xy, yx, yz, xz) = (d(&x, &y), d(&y, &x), d(&y, &z), d(&x, &z));
        prop_assert!((xy - yx).abs() <= 1e-12);
        prop_assert!(xz <= xy + yz + 1e-12);
        prop_assert!(xy <= uniform_distance(&x, &y) + 1e-12);
        prop_assert_eq!(d(&x, &x), 0.0);
    }

    #[test]
    fn more_decay_keeps_gates_open(
        d in 1u32..4,
        p in 1.1f64..2.0,
        extra in 0.0f64..3.0,
        alpha in 0.0f64..6.0,
        gamma in 0.0f64..1.0,
        delta in -1.0f64..1.0,
    ) {
        let (d, q, r) = (d as f64, p + 0.5, p.max(2.0));
        if check_ex01(d, p, q, r, alpha, delta).passed {
            prop_assert!(check_ex01(d, p, q, r, alpha + extra, delta).passed);
        }
        if check_claim_spectral(alpha, gamma, d, p, r).passed {
            prop_assert!(check_claim_spectral(alpha + extra, gamma, d, p, r).passed);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn runs_reproduce_from_seed(seed in any::<u64>()) {
        let nu = LevyMeasure::symmetric_pair(0.7, 6.0).unwrap();
        prop_assert_eq!(sample_prm(&nu, 2.0, seed).unwrap(), sample_prm(&nu, 2.0, seed).unwrap());

        let op = SpectralOperator::dirichlet_laplacian(4).unwrap();
        let mut s = GridScheme::new(op.unit(0), 1.0, 4);
        s.drift = DriftSpec::poly(3.0, 1.0);
        s.diffusion = DiffusionSpec::Sin;
        s.noise = NoiseSpec::Spectral(SpectralNoiseSpec { decay: 2.0, modes: 4, base: nu });
        let a = simulate_mc(&op, &s, &McOptions::new(3, seed)).unwrap();
        let b = simulate_mc(&op, &s, &McOptions::new(3, seed)).unwrap();
        prop_assert_eq!(a.paths, b.paths);
        prop_assert_eq!(a.seeds, b.seeds);
    }
}
