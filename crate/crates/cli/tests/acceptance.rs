//! Acceptance suite: one PASS/FAIL line per criterion.

use std::path::Path;
use std::time::Instant;

use levyrd_cli::{run, Command, Invocation};
use levyrd_core::diagnostics::{
    apriori_ensemble_check, bootstrap, cauchy_decay_fit, mean, moment_estimate, ou_oracle, variance,
};
use levyrd_core::gate::{check_claim_spectral, check_ex01, check_main, check_stpn, claim_threshold};
use levyrd_core::noise::{classify_partial_sums, spectral_moment_sum, ScalarNoiseSpec};
use levyrd_core::prm::{compensated_integral, sample_prm};
use levyrd_core::rng::{derive_seed, rng_from_seed};
use levyrd_core::solver::{grid_approx_path, simulate_mc};
use levyrd_core::spectral::BesovFilterBank;
use levyrd_core::{
    DiffusionSpec, DriftSpec, GridScheme, LevyMeasure, McOptions, NoiseSpec, NormKind, SpectralField,
    SpectralNoiseSpec, SpectralOperator,
};
use rand::Rng;

type Integrand = fn(f64, f64) -> f64;
type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

const LAW_DRAWS: usize = 100_000;

fn law_measures() -> Vec<(&'static str, LevyMeasure, f64)> {
    vec![
        ("atom", LevyMeasure::atom(1.0, 2.0).unwrap(), 1.0),
        ("symmetric pair", LevyMeasure::symmetric_pair(0.5, 6.0).unwrap(), 2.0),
        ("uniform density", LevyMeasure::uniform(-1.0, 1.0, 1.5).unwrap(), 1.0),
        (
            "tempered, eps = 0.05",
            LevyMeasure::tempered(1.0, 0.5, 1.2, 2.0, 1.0, 0.05).unwrap(),
            0.5,
        ),
        (
            "tempered, default cutoff",
            LevyMeasure::tempered_with_default_cutoff(1.0, 1.0, 0.5, 1.0, 1.0, 2.0).unwrap(),
            0.1,
        ),
    ]
}

fn prm_law() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, (name, nu, horizon)) in law_measures().into_iter().enumerate() {
        let mut counts = Vec::with_capacity(LAW_DRAWS);
        let (mut left, mut right) = (Vec::with_capacity(LAW_DRAWS), Vec::with_capacity(LAW_DRAWS));
        for d in 0..LAW_DRAWS {
            let pm = sample_prm(&nu, horizon, derive_seed(100 + k as u64, d as u64)).unwrap();
            counts.push(pm.len() as f64);
            left.push(pm.window(0.0, 0.5 * horizon).len() as f64);
            right.push(pm.window(0.5 * horizon, horizon).len() as f64);
        }
        let mt = nu.total_mass() * horizon;
        let band = 4.0 * (mt / LAW_DRAWS as f64).sqrt();
        let dev = (mean(&counts) - mt).abs();
        let rho = correlation(&left, &right);
        let good = dev <= band && rho.abs() <= 4.0 / (LAW_DRAWS as f64).sqrt();
        ok &= good;
        parts.push(format!("{name}: |mean-mT|/band={:.2}, corr={rho:+.4}", dev / band));
    }
    verdict(ok, parts.join("; "))
}

fn martingale() -> Verdict {
    let nu = LevyMeasure::uniform(-0.5, 1.5, 2.0).unwrap();
    let horizon = 1.0;
    let integrands: [(&str, Integrand); 3] = [
        ("1", |_, _| 1.0),
        ("tanh(z)", |_, z| z.tanh()),
        ("cos(3t) min(|z|,1)", |t, z| (3.0 * t).cos() * z.abs().min(1.0)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, (name, f)) in integrands.iter().enumerate() {
        let samples: Vec<f64> = (0..LAW_DRAWS)
            .map(|d| {
                let pm = sample_prm(&nu, horizon, derive_seed(200 + k as u64, d as u64)).unwrap();
                compensated_integral(&pm, &nu, f, 0.0, horizon).unwrap()
            })
            .collect();
        let z = mean(&samples) / (variance(&samples) / LAW_DRAWS as f64).sqrt();
        ok &= z.abs() <= 4.0;
        parts.push(format!("f={name}: z={z:+.2}"));
    }
    verdict(ok, parts.join("; "))
}

fn ou_equivalence() -> Verdict {
    let op = SpectralOperator::dirichlet_laplacian(4).unwrap();
    let nu = LevyMeasure::uniform(-0.5, 1.5, 1.0).unwrap();
    let x = SpectralField::new(vec![1.0, 0.5, -0.25, 0.125]);
    let mut s = GridScheme::new(x.clone(), 1.0, 6);
    s.diffusion = DiffusionSpec::Const { value: 1.0 };
    s.noise = NoiseSpec::Spectral(SpectralNoiseSpec {
        decay: 1.0,
        modes: 4,
        base: nu.clone(),
    });
    let ens = simulate_mc(&op, &s, &McOptions::new(10_000, 31)).unwrap();
    let mut worst: f64 = 0.0;
    for (c, t) in [0.0625, 0.125, 0.25, 0.5, 1.0].into_iter().enumerate() {
        for i in 0..4 {
            let (m, v) = ou_oracle(&op, i + 1, x.coeffs()[i], 1.0 / (i + 1) as f64, &nu, t).unwrap();
            let xs: Vec<f64> = ens.paths.iter().map(|p| p.u.state_at(t).coeffs()[i]).collect();
            let seed = derive_seed(300, (4 * c + i) as u64);
            let bm = bootstrap(&xs, seed, mean);
            let bv = bootstrap(&xs, seed, variance);
            worst = worst.max((bm.estimate - m).abs() / bm.std_error);
            worst = worst.max((bv.estimate - v).abs() / bv.std_error);
        }
    }
    verdict(
        worst <= 3.0,
        format!("max deviation {worst:.2} bootstrap-sigma over 5 times x 4 modes x (mean, variance)"),
    )
}

fn zero_noise() -> Verdict {
    let op = SpectralOperator::dirichlet_laplacian(16).unwrap();
    let grid: Vec<f64> = op.grid().iter().map(|x| 2.0 * (std::f64::consts::PI * x).sin()).collect();
    let mut s = GridScheme::new(op.project(&grid), 0.5, 6);
    s.drift = DriftSpec::poly(3.0, 1.0);
    let errs: Vec<f64> = [6u32, 8, 10]
        .iter()
        .map(|&n| {
            let coarse = grid_approx_path(&op, &s.at_level(n), 0).unwrap();
            let fine = grid_approx_path(&op, &s.at_level(n + 2), 0).unwrap();
            coarse
                .grid_times()
                .iter()
                .zip(coarse.grid_states())
                .map(|(t, u)| NormKind::Sup.eval(&op, &(&u - fine.u.state_at(*t))))
                .fold(0.0, f64::max)
        })
        .collect();
    let r = [errs[0] / errs[1], errs[1] / errs[2]];
    let order = r.map(|x| x.log2() / 2.0);
    verdict(
        r.iter().all(|x| *x >= 1.7 * 1.7),
        format!(
            "sup errors {:.3e}, {:.3e}, {:.3e}; ratio per level {:.2}, {:.2}; order {:.2}, {:.2}",
            errs[0],
            errs[1],
            errs[2],
            r[0].sqrt(),
            r[1].sqrt(),
            order[0],
            order[1]
        ),
    )
}

fn cauchy_decay() -> Verdict {
    let op = SpectralOperator::dirichlet_laplacian(16).unwrap();
    let mut s = GridScheme::new(op.unit(0), 1.0, 4);
    s.drift = DriftSpec::linear(1.0);
    s.diffusion = DiffusionSpec::Sin;
    s.noise = NoiseSpec::Scalar(ScalarNoiseSpec {
        measure: LevyMeasure::symmetric_pair(0.5, 8.0).unwrap(),
    });
    let seeds: Vec<u64> = (0..8).map(|r| derive_seed(500, r)).collect();
    let levels: Vec<u32> = (4..=10).collect();
    let fit = cauchy_decay_fit(&op, &s, &levels, &seeds, 2.0, 2.0, NormKind::B { p: 2.0 }).unwrap();
    verdict(
        fit.theta > 0.0 && fit.r_squared > 0.9,
        format!("theta = {:.3}, R^2 = {:.4}", fit.theta, fit.r_squared),
    )
}

fn apriori() -> Verdict {
    let op = SpectralOperator::dirichlet_laplacian(32).unwrap();
    let mut s = GridScheme::new(op.unit(0), 1.0, 8);
    s.drift = DriftSpec::poly(3.0, 1.0);
    s.diffusion = DiffusionSpec::Sinsininv;
    s.noise = NoiseSpec::Spectral(SpectralNoiseSpec {
        decay: 3.0,
        modes: 32,
        base: LevyMeasure::symmetric_pair(1.0, 4.0).unwrap(),
    });
    s.record_components = true;
    let ens = simulate_mc(&op, &s, &McOptions::new(100, 600)).unwrap();
    let r = apriori_ensemble_check(&op, &ens, &s.drift, NormKind::Sup, 0.05).unwrap();
    verdict(
        r.passed,
        format!("worst |z|/R = {:.3} (bound {:.2}), {} of 100 replicas violate", r.value, 1.05, r.values[0]),
    )
}

fn moment_bound() -> Verdict {
    let op = SpectralOperator::dirichlet_laplacian(16).unwrap();
    let mut s = GridScheme::new(op.unit(0), 1.0, 6);
    s.drift = DriftSpec::poly(3.0, 1.0);
    s.diffusion = DiffusionSpec::Sin;
    s.noise = NoiseSpec::Spectral(SpectralNoiseSpec {
        decay: 3.0,
        modes: 16,
        base: LevyMeasure::symmetric_pair(1.0, 4.0).unwrap(),
    });
    let levels = [6u32, 8, 10];
    let mut est = Vec::new();
    let mut se = Vec::new();
    for &n in &levels {
        let ens = simulate_mc(&op, &s.at_level(n), &McOptions::new(100, 700)).unwrap();
        let r = moment_estimate(&op, &ens, 2.0, 2.0, NormKind::E { delta: 0.25, p: 2.0 }).unwrap();
        est.push(r.value);
        se.push(r.values[0]);
    }
    let mut spread: f64 = 0.0;
    for i in 0..3 {
        for j in i + 1..3 {
            spread = spread.max((est[i] - est[j]).abs() / est[i].min(est[j]));
        }
    }
    let x: Vec<f64> = levels.iter().map(|&n| n as f64).collect();
    let xm = mean(&x);
    let sxx: f64 = x.iter().map(|v| (v - xm).powi(2)).sum();
    let slope: f64 = x.iter().zip(&est).map(|(a, b)| (a - xm) * b).sum::<f64>() / sxx;
    let slope_se = (x.iter().zip(&se).map(|(a, s)| ((a - xm) * s).powi(2)).sum::<f64>()).sqrt() / sxx;
    let contains_zero = slope.abs() <= 1.96 * slope_se;
    verdict(
        spread < 0.15 && contains_zero,
        format!(
            "estimates {:.4}, {:.4}, {:.4}; max pairwise {:.1}%; slope {:+.2e} +- {:.2e}",
            est[0],
            est[1],
            est[2],
            100.0 * spread,
            slope,
            1.96 * slope_se
        ),
    )
}

fn besov_dirac() -> Verdict {
    let bank = BesovFilterBank::new(1.5).unwrap();
    let fs: [fn(f64) -> f64; 3] = [
        |x| (-x * x).exp(),
        |x| (-(x - 1.0).powi(2) / 2.0).exp() * x.cos(),
        |x| 1.0 / x.cosh().powi(2),
    ];
    let ratios: Vec<f64> = fs.iter().map(|f| bank.dirac_integral_ratio(f, -12.0, 12.0, 241).unwrap()).collect();
    let dev = ratios[1..]
        .iter()
        .map(|r| (r - ratios[0]).abs() / ratios[0])
        .fold(0.0, f64::max);
    verdict(dev < 1e-3, format!("ratios {ratios:.6?}; max relative spread {dev:.2e}"))
}

fn gate() -> Verdict {
    let tuple = check_ex01(1.0, 2.0, 2.0, 2.0, 3.0, -0.5);
    let thresholds = [
        check_ex01(1.0, 2.0, 2.0, 2.0, 2.0, -10.0).passed,
        check_main(0.7, 0.5, 0.2, 0.3, 2.0).passed,
        check_stpn(1.0, 2, 2.0, 2.0, 0.5).passed,
        check_claim_spectral(1.0, 0.0, 1.0, 2.0, 2.0).passed,
    ];
    let mut rng = rng_from_seed(900);
    let mut agree = 0;
    let mut tried = 0;
    while tried < 50 {
        let d = rng.random_range(1..=3) as f64;
        let p = rng.random_range(1.1..2.0);
        let r = rng.random_range(2.0..6.0);
        let gamma = rng.random_range(0.0..1.5);
        let alpha = rng.random_range(0.5..5.0);
        if (alpha - claim_threshold(gamma, d, p, r)).abs() < 1e-3 {
            continue;
        }
        tried += 1;
        let g = check_claim_spectral(alpha, gamma, d, p, r).passed;
        let blocks = classify_partial_sums(alpha, gamma, p, r, d, 2000);
        let sum = spectral_moment_sum(alpha, gamma, p, r, d, None).convergent;
        if g == blocks && g == sum {
            agree += 1;
        }
    }
    verdict(
        tuple.passed && thresholds.iter().all(|p| !p) && agree == 50,
        format!(
            "tuple passes: {}; threshold tuples failing: {}/4; random tuples agreeing: {agree}/50",
            tuple.passed,
            thresholds.iter().filter(|p| !**p).count()
        ),
    )
}

fn determinism() -> Verdict {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let tmp = tempfile::tempdir().unwrap();
    let commands = [
        Command::Gate,
        Command::Simulate,
        Command::Diagnose,
        Command::Ladder,
        Command::NoiseSample,
    ];
    let mut compared = 0;
    let mut mismatched = Vec::new();
    for name in ["eq1", "spde011", "stpn", "ex01"] {
        for cmd in commands {
            let mut manifests = Vec::new();
            for (pass, threads) in [(0, 1), (1, 3)] {
                let mut inv = Invocation::new(cmd, configs.join(format!("{name}.toml")));
                inv.replicas = Some(16);
                inv.threads = Some(threads);
                inv.out = Some(tmp.path().join(format!("{name}-{}-{pass}", cmd.name())));
                manifests.push(run(&inv).ok().map(|o| std::fs::read(o.manifest).unwrap()));
            }
            if manifests[0].is_some() {
                compared += 1;
                if manifests[0] != manifests[1] {
                    mismatched.push(format!("{name}/{}", cmd.name()));
                }
            }
        }
    }
    verdict(
        mismatched.is_empty() && compared >= 16,
        format!("{compared} manifests compared across two invocations (1 vs 3 threads); mismatches: {mismatched:?}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("PRM law", prm_law),
        ("martingale property", martingale),
        ("OU oracle equivalence", ou_equivalence),
        ("zero-noise reduction", zero_noise),
        ("Cauchy decay of the grid scheme", cauchy_decay),
        ("a-priori drift bound", apriori),
        ("moment bound uniform in n", moment_bound),
        ("Besov-Dirac identity", besov_dirac),
        ("hypothesis gate", gate),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let secs = start.elapsed().as_secs_f64();
        if !v.passed {
            failures += 1;
        }
        println!(
            "{} {:>2} {name} ({secs:.1} s): {}",
            if v.passed { "PASS" } else { "FAIL" },
            k + 1,
            v.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
