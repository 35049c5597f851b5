use levyrd_core::noise::ScalarNoiseSpec;
use levyrd_core::prm::sample_prm;
use levyrd_core::rng::derive_seed;
use levyrd_core::solver::{
    cell_average, grid_approx_path, lambda_frac_inverse, simulate_mc, stochastic_convolution, ConstantIntegrand,
};
use levyrd_core::spectral::norms::semigroup_apply;
use levyrd_core::{
    DiffusionSpec, DriftSpec, GridScheme, LevyMeasure, McOptions, NoiseSpec, PathRecord, PointMeasure, SpectralField,
    SpectralNoiseSpec, SpectralOperator,
};

fn mean_var(x: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = x.iter().map(|v| (v - m).powi(4)).sum::<f64>() / n;
    (m, v, ((m4 - v * v) / n).sqrt())
}

#[test]
fn stochastic_convolution_examples() {
    let op = SpectralOperator::dirichlet_laplacian(3).unwrap();
    let sym = LevyMeasure::symmetric_pair(1.0, 1.0).unwrap();
    let w = SpectralField::new(vec![1.0, -0.5, 2.0]);
    let integrand = ConstantIntegrand::new(w.clone(), &sym, 0.125).unwrap();
    let none = stochastic_convolution(&op, &integrand, &PointMeasure::empty(1.0), 0.8).unwrap();
    assert!(none.coeffs().iter().all(|c| c.abs() < 1e-15));

    let pm = PointMeasure::from_atoms(1.0, vec![levyrd_core::prm::Atom { t: 0.3, mark: 1.0 }]).unwrap();
    let v = stochastic_convolution(&op, &integrand, &pm, 0.8).unwrap();
    for (i, c) in v.coeffs().iter().enumerate() {
        let target = (-op.rho(i) * 0.5).exp() * w.coeffs()[i];
        assert!((c - target).abs() < 1e-15 * target.abs().max(1e-300) + 1e-300, "{i}");
    }
    assert!(stochastic_convolution(&op, &integrand, &pm, 1.5).is_err());
}

#[test]
fn stochastic_convolution_ou_variance() {
    let op = SpectralOperator::dirichlet_laplacian(2).unwrap();
    let nu = LevyMeasure::symmetric_pair(1.0, 1.0).unwrap();
    let sigma = 1.0;
    let integrand = ConstantIntegrand::new(op.unit(0).scale(sigma), &nu, 1.0 / 64.0).unwrap();
    let t = 0.1;
    let draws = 10_000;
    let samples: Vec<f64> = (0..draws)
        .map(|r| {
            let pm = sample_prm(&nu, 1.0, derive_seed(41, r)).unwrap();
            stochastic_convolution(&op, &integrand, &pm, t).unwrap().coeffs()[0]
        })
        .collect();
    let rho = op.rho(0);
    let oracle = sigma * sigma * (1.0 - (-2.0 * rho * t).exp()) / (2.0 * rho);
    let (mean, var, se_var) = mean_var(&samples);
    assert!(mean.abs() <= 4.0 * (var / draws as f64).sqrt());
    assert!((var - oracle).abs() <= 4.0 * se_var, "{var} vs {oracle} (se {se_var})");
}

#[test]
fn half_power_composes_to_full_inverse() {
    let op = SpectralOperator::dirichlet_laplacian(2).unwrap();
    let n = 12;
    let steps = 1usize << n;
    let h = 1.0 / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
    let c = [1.5, -0.7];
    // f(t) = c t, entered through its exact cell averages.
    let f = PathRecord::from_samples(
        times.clone(),
        times.iter().map(|t| SpectralField::new(c.iter().map(|ci| ci * (t + 0.5 * h)).collect())).collect(),
    )
    .unwrap();
    let half = lambda_frac_inverse(&op, 0.5, &f).unwrap();
    // Step intermediate holding the trapezoidal cell average on each interval.
    let avg: Vec<SpectralField> = (0..=steps)
        .map(|k| {
            if k == steps {
                half.states[k].clone()
            } else {
                (&half.states[k] + &half.states[k + 1]).scale(0.5)
            }
        })
        .collect();
    let twice = lambda_frac_inverse(&op, 0.5, &PathRecord::from_samples(times.clone(), avg).unwrap()).unwrap();
    let full = lambda_frac_inverse(&op, 1.0, &f).unwrap();
    for (i, ci) in c.iter().enumerate() {
        let rho = op.rho(i);
        // ∫_0^t e^{-ρ(t-s)} c s ds
        let exact: Vec<f64> = times.iter().map(|t| ci * (t / rho - (1.0 - (-rho * t).exp()) / (rho * rho))).collect();
        let scale = exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let rel = |path: &PathRecord| {
            path.states.iter().zip(&exact).map(|(s, e)| (s.coeffs()[i] - e).abs()).fold(0.0, f64::max) / scale
        };
        assert!(rel(&full) < 1e-6, "mode {i}: {}", rel(&full));
        assert!(rel(&twice) < 1e-3, "mode {i}: {}", rel(&twice));
    }
}

fn linear_scheme(level: u32, noise: NoiseSpec) -> (SpectralOperator, GridScheme) {
    let op = SpectralOperator::from_eigenvalues(vec![2.0], None).unwrap();
    let mut s = GridScheme::new(SpectralField::new(vec![1.0]), 1.0, level);
    s.drift = DriftSpec::linear(1.0);
    s.diffusion = DiffusionSpec::Const { value: 0.5 };
    s.noise = noise;
    (op, s)
}

#[test]
fn linear_drift_mean_converges_to_ode() {
    let exact = (-(2.0f64 - 1.0)).exp();
    let mut errs = Vec::new();
    for level in [4, 6, 8, 10] {
        let (op, s) = linear_scheme(level, NoiseSpec::None);
        let path = grid_approx_path(&op, &s, 0).unwrap();
        errs.push((path.u.state_at(1.0).coeffs()[0] - exact).abs());
    }
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!(ratio > 3.0 && ratio < 5.0, "{errs:?}");
    }

    let nu = LevyMeasure::symmetric_pair(0.5, 8.0).unwrap();
    let (op, s) = linear_scheme(8, NoiseSpec::Scalar(ScalarNoiseSpec { measure: nu }));
    let ens = simulate_mc(&op, &s, &McOptions::new(4000, 12)).unwrap();
    let finals: Vec<f64> = ens.paths.iter().map(|p| p.u.state_at(1.0).coeffs()[0]).collect();
    let (mean, var, _) = mean_var(&finals);
    let se = (var / finals.len() as f64).sqrt();
    assert!((mean - exact).abs() <= 4.0 * se + errs[2], "{mean} vs {exact}");
}

#[test]
fn zero_noise_nonlinear_self_convergence() {
    let op = SpectralOperator::dirichlet_laplacian(8).unwrap();
    let grid: Vec<f64> = op.grid().iter().map(|x| (std::f64::consts::PI * x).sin() * 2.0).collect();
    let mut s = GridScheme::new(op.project(&grid), 0.5, 5);
    s.drift = DriftSpec::poly(3.0, 1.0);
    let reference = grid_approx_path(&op, &s.at_level(11), 0).unwrap();
    let errs: Vec<f64> = [5, 7, 9]
        .iter()
        .map(|&n| {
            let p = grid_approx_path(&op, &s.at_level(n), 0).unwrap();
            p.grid_times()
                .iter()
                .zip(p.grid_states())
                .map(|(t, u)| {
                    let d = &u - reference.u.state_at(*t);
                    d.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()))
                })
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(errs[0] / errs[1] > 1.7 * 1.7 && errs[1] / errs[2] > 1.7 * 1.7, "{errs:?}");
}

#[test]
fn free_evolution_is_exact() {
    let op = SpectralOperator::dirichlet_laplacian(4).unwrap();
    let x = SpectralField::new(vec![1.0, 0.5, -0.25, 0.125]);
    let s = GridScheme::new(x.clone(), 0.25, 6);
    let path = grid_approx_path(&op, &s, 3).unwrap();
    for (t, u) in path.grid_times().iter().zip(path.grid_states()) {
        let exact = semigroup_apply(&op, *t, &x).unwrap();
        for (a, b) in u.coeffs().iter().zip(exact.coeffs()) {
            assert!((a - b).abs() <= 1e-14 * b.abs().max(1e-12), "t={t}");
        }
    }
}

#[test]
fn cell_average_closed_forms() {
    let op = SpectralOperator::from_eigenvalues(vec![3.0], None).unwrap();
    let x = 2.0;
    let s = GridScheme::new(SpectralField::new(vec![x]), 1.0, 4);
    let path = grid_approx_path(&op, &s, 0).unwrap();
    assert_eq!(cell_average(&op, &path.u, 4, 0).unwrap(), s.initial);
    let h = 1.0 / 16.0;
    for k in 1..16 {
        let (a, b) = ((k - 1) as f64 * h, k as f64 * h);
        let exact = x * ((-3.0 * a).exp() - (-3.0 * b).exp()) / (3.0 * (b - a));
        let got = cell_average(&op, &path.u, 4, k).unwrap().coeffs()[0];
        assert!((got - exact).abs() < 1e-13, "k={k}: {got} vs {exact}");
        assert!((path.cell_values[k].coeffs()[0] - exact).abs() < 1e-13);
    }
    let times: Vec<f64> = (0..=16).map(|k| k as f64 * h).collect();
    let constant = PathRecord::from_samples(times, vec![SpectralField::new(vec![0.7]); 17]).unwrap();
    for k in 1..16 {
        assert!((cell_average(&op, &constant, 4, k).unwrap().coeffs()[0] - 0.7).abs() < 1e-13);
    }
}

#[test]
fn jumps_sit_at_atom_times() {
    let nu = LevyMeasure::uniform(-1.0, 1.0, 3.0).unwrap();
    let (op, s) = linear_scheme(5, NoiseSpec::Scalar(ScalarNoiseSpec { measure: nu.clone() }));
    for seed in 0..10 {
        let path = grid_approx_path(&op, &s, seed).unwrap();
        let atoms = sample_prm(&nu, 1.0, seed).unwrap();
        let amplitude = op.project_constant(0.5).coeffs()[0];
        let jump_times: Vec<f64> = path.u.jumps().iter().map(|(k, _)| path.u.times[*k]).collect();
        let atom_times: Vec<f64> = atoms.atoms().iter().map(|a| a.t).collect();
        assert_eq!(jump_times, atom_times);
        for (k, left) in path.u.jumps() {
            let size = path.u.states[*k].coeffs()[0] - left.coeffs()[0];
            let z = atoms.atoms().iter().find(|a| a.t == path.u.times[*k]).unwrap().mark;
            assert!((size - amplitude * z).abs() < 1e-14);
        }
    }
}

#[test]
fn ensemble_examples() {
    let nu = LevyMeasure::symmetric_pair(1.0, 2.0).unwrap();
    let spec = SpectralNoiseSpec {
        decay: 1.0,
        modes: 4,
        base: nu,
    };
    let op = SpectralOperator::dirichlet_laplacian(4).unwrap();
    let mut s = GridScheme::new(op.unit(0), 0.5, 5);
    s.noise = NoiseSpec::Spectral(spec);
    s.diffusion = DiffusionSpec::Sin;
    let opts = McOptions::new(1, 99);
    let ens = simulate_mc(&op, &s, &opts).unwrap();
    let direct = grid_approx_path(&op, &s, opts.seed(0)).unwrap();
    assert_eq!(ens.paths[0], direct);

    s.noise = NoiseSpec::None;
    let ens = simulate_mc(&op, &s, &McOptions::new(16, 5)).unwrap();
    for p in &ens.paths[1..] {
        assert_eq!(p.u, ens.paths[0].u);
    }
}

#[test]
fn ou_ensemble_matches_oracle() {
    let op = SpectralOperator::dirichlet_laplacian(2).unwrap();
    let nu = LevyMeasure::symmetric_pair(1.0, 1.0).unwrap();
    let x = SpectralField::new(vec![1.0, 0.5]);
    let mut s = GridScheme::new(x.clone(), 0.5, 5);
    s.diffusion = DiffusionSpec::Const { value: 1.0 };
    s.noise = NoiseSpec::Spectral(SpectralNoiseSpec {
        decay: 1.0,
        modes: 2,
        base: nu.clone(),
    });
    let ens = simulate_mc(&op, &s, &McOptions::new(4000, 8)).unwrap();
    for t in [0.0625, 0.125, 0.25, 0.5] {
        for i in 0..2 {
            let sigma = 1.0 / (i + 1) as f64;
            let (m, v) = levyrd_core::diagnostics::ou_oracle(&op, i + 1, x.coeffs()[i], sigma, &nu, t).unwrap();
            let xs: Vec<f64> = ens.paths.iter().map(|p| p.u.state_at(t).coeffs()[i]).collect();
            let (mean, var, se_var) = mean_var(&xs);
            assert!((mean - m).abs() <= 4.0 * (var / xs.len() as f64).sqrt(), "t={t} i={i}");
            assert!((var - v).abs() <= 4.0 * se_var, "t={t} i={i}: {var} vs {v}");
        }
    }
}
