use serde::{Deserialize, Serialize};

use super::report::{bootstrap, linear_fit, mean, EstimateReport};
use crate::coefficients::DriftSpec;
use crate::error::{invalid, Error, Result};
use crate::prm::LevyMeasure;
use crate::rng::derive_seed;
use crate::solver::{Ensemble, GridScheme, PreparedNoise};
use crate::spectral::{lp_lambda_integral, NormKind, PathRecord, SpectralField, SpectralOperator};

const BOOTSTRAP_STREAM: u64 = 0xB007;

fn resample_seed(seeds: &[u64]) -> u64 {
    derive_seed(seeds.first().copied().unwrap_or(0), BOOTSTRAP_STREAM)
}

/// MC estimate of `E ∫_0^T e^{-λt} |u(t)|^p dt` over the given paths.
pub fn moment_estimate_paths<'a, I>(
    op: &SpectralOperator,
    paths: I,
    seeds: &[u64],
    p: f64,
    lambda: f64,
    kind: NormKind,
) -> Result<EstimateReport>
where
    I: IntoIterator<Item = &'a PathRecord>,
{
    let samples = paths
        .into_iter()
        .map(|u| lp_lambda_integral(op, u, p, lambda, kind))
        .collect::<Result<Vec<f64>>>()?;
    if samples.is_empty() {
        return Err(invalid("ensemble", "no replicas"));
    }
    let b = bootstrap(&samples, resample_seed(seeds), mean);
    Ok(EstimateReport {
        name: "weighted p-moment integral".into(),
        value: b.estimate,
        values: vec![b.std_error],
        bound: None,
        tolerance: 0.0,
        ci: Some([b.ci_low, b.ci_high]),
        passed: b.estimate.is_finite(),
        replicas: samples.len(),
        seeds: seeds.to_vec(),
    })
}

/// [`moment_estimate_paths`] over the paths `u_n` of an ensemble.
pub fn moment_estimate(
    op: &SpectralOperator,
    ens: &Ensemble,
    p: f64,
    lambda: f64,
    kind: NormKind,
) -> Result<EstimateReport> {
    moment_estimate_paths(op, ens.paths.iter().map(|s| &s.u), &ens.seeds, p, lambda, kind)
}

/// One row of the per-time ensemble summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub time: f64,
    #[serde(rename = "mean_norm_B")]
    pub mean_norm_b: f64,
    #[serde(rename = "p_moment_E")]
    pub p_moment_e: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// At each grid time: the mean of `|u_n(t)|_B`, the mean of `|u_n(t)|_E^p`
/// and a bootstrap 95% interval for the latter.
pub fn grid_summary(op: &SpectralOperator, ens: &Ensemble, b_norm: NormKind, e_norm: NormKind, p: f64) -> Vec<SummaryRow> {
    let Some(first) = ens.paths.first() else {
        return Vec::new();
    };
    let times = first.grid_times();
    let grids: Vec<Vec<SpectralField>> = ens.paths.iter().map(|s| s.grid_states()).collect();
    let seed = resample_seed(&ens.seeds);
    times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let b: Vec<f64> = grids.iter().map(|g| b_norm.eval(op, &g[k])).collect();
            let e: Vec<f64> = grids.iter().map(|g| e_norm.eval(op, &g[k]).powf(p)).collect();
            let boot = bootstrap(&e, derive_seed(seed, k as u64), mean);
            SummaryRow {
                time: t,
                mean_norm_b: mean(&b),
                p_moment_e: boot.estimate,
                ci_low: boot.ci_low,
                ci_high: boot.ci_high,
            }
        })
        .collect()
}

/// Compares `|z(t)|` with `R(t) = ∫_0^t e^{-k(t-s)} a(|v(s)|) ds` at every
/// recorded time. `R` is advanced interval by interval with `a(|v|)` averaged
/// over the endpoint values and the kernel integrated exactly. The report value
/// is the largest ratio `|z|/R`.
pub fn apriori_bound_check<A: Fn(f64) -> f64>(
    op: &SpectralOperator,
    z: &PathRecord,
    v: &PathRecord,
    k: f64,
    a: A,
    kind: NormKind,
    tol: f64,
) -> Result<EstimateReport> {
    if z.times != v.times {
        return Err(Error::GridMismatch("z and v are recorded on different times".into()));
    }
    let kernel = |dt: f64| -> f64 {
        if k == 0.0 {
            dt
        } else {
            -(-k * dt).exp_m1() / k
        }
    };
    let mut rhs = 0.0;
    let mut worst: f64 = 0.0;
    let mut min_slack = f64::INFINITY;
    let mut passed = true;
    for j in 0..z.len() {
        if j > 0 {
            let dt = z.times[j] - z.times[j - 1];
            let aa = 0.5 * (a(kind.eval(op, &v.states[j - 1])) + a(kind.eval(op, v.left_limit(j))));
            rhs = (-k * dt).exp() * rhs + aa * kernel(dt);
        }
        for lhs in [kind.eval(op, z.left_limit(j)), kind.eval(op, &z.states[j])] {
            let ratio = if lhs == 0.0 {
                0.0
            } else if rhs > 0.0 {
                lhs / rhs
            } else {
                f64::INFINITY
            };
            worst = worst.max(ratio);
            min_slack = min_slack.min(rhs * (1.0 + tol) - lhs);
            passed &= lhs <= rhs * (1.0 + tol);
        }
    }
    Ok(EstimateReport {
        name: "a-priori drift bound".into(),
        value: worst,
        values: vec![min_slack],
        bound: Some(1.0 + tol),
        tolerance: tol,
        ci: None,
        passed,
        replicas: 1,
        seeds: Vec::new(),
    })
}

/// [`apriori_bound_check`] on every replica of an ensemble run with
/// `record_components`; `a` and `k` come from the drift.
pub fn apriori_ensemble_check(
    op: &SpectralOperator,
    ens: &Ensemble,
    drift: &DriftSpec,
    kind: NormKind,
    tol: f64,
) -> Result<EstimateReport> {
    let mut worst: f64 = 0.0;
    let mut passed = true;
    let mut failures = 0usize;
    for s in &ens.paths {
        let c = s
            .components
            .as_ref()
            .ok_or_else(|| invalid("ensemble", "components were not recorded"))?;
        let v = c.remainder()?;
        let r = apriori_bound_check(op, &c.drift, &v, drift.k, |x| drift.a(x), kind, tol)?;
        worst = worst.max(r.value);
        if !r.passed {
            failures += 1;
            passed = false;
        }
    }
    Ok(EstimateReport {
        name: "a-priori drift bound".into(),
        value: worst,
        values: vec![failures as f64],
        bound: Some(1.0 + tol),
        tolerance: tol,
        ci: None,
        passed,
        replicas: ens.len(),
        seeds: ens.seeds.clone(),
    })
}

/// Fitted `d_n ≈ C 2^{-θ n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub levels: Vec<u32>,
    pub distances: Vec<f64>,
    pub theta: f64,
    pub log2_constant: f64,
    pub r_squared: f64,
}

/// Least-squares fit of `log2 d_n = c - θ n`. All-zero distances give `θ = ∞`.
pub fn fit_decay(levels: &[u32], distances: &[f64]) -> Result<DecayFit> {
    if levels.len() < 3 {
        return Err(Error::TooFewLevels {
            needed: 3,
            got: levels.len(),
        });
    }
    if levels.len() != distances.len() {
        return Err(Error::GridMismatch(format!("{} levels, {} distances", levels.len(), distances.len())));
    }
    if distances.iter().all(|d| *d == 0.0) {
        return Ok(DecayFit {
            levels: levels.to_vec(),
            distances: distances.to_vec(),
            theta: f64::INFINITY,
            log2_constant: f64::NEG_INFINITY,
            r_squared: 1.0,
        });
    }
    if distances.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(invalid("distances", "must all be positive and finite"));
    }
    let x: Vec<f64> = levels.iter().map(|&n| n as f64).collect();
    let y: Vec<f64> = distances.iter().map(|d| d.log2()).collect();
    let (slope, c, r2) = linear_fit(&x, &y);
    Ok(DecayFit {
        levels: levels.to_vec(),
        distances: distances.to_vec(),
        theta: -slope,
        log2_constant: c,
        r_squared: r2,
    })
}

/// `‖û_n - u_n‖_{M^p_λ}` at each level on shared noise, averaged in `p`-th
/// power over `seeds`, then fitted with [`fit_decay`].
pub fn cauchy_decay_fit(
    op: &SpectralOperator,
    scheme: &GridScheme,
    levels: &[u32],
    seeds: &[u64],
    p: f64,
    lambda: f64,
    kind: NormKind,
) -> Result<DecayFit> {
    if levels.len() < 3 {
        return Err(Error::TooFewLevels {
            needed: 3,
            got: levels.len(),
        });
    }
    if seeds.is_empty() {
        return Err(invalid("seeds", "at least one seed is required"));
    }
    let noise = PreparedNoise::new(&scheme.noise, op)?;
    let mut distances = Vec::with_capacity(levels.len());
    for &n in levels {
        let s = scheme.at_level(n);
        s.validate(op)?;
        let mut acc = 0.0;
        for &seed in seeds {
            let path = noise.run(op, &s, seed, None)?;
            let diff = path.u_hat.zip_with(&path.u, |a, b| a - b)?;
            acc += lp_lambda_integral(op, &diff, p, lambda, kind)?;
        }
        distances.push((acc / seeds.len() as f64).powf(1.0 / p));
    }
    fit_decay(levels, &distances)
}

/// Estimates `E sup_{t1 ≤ t ≤ t1+w} e^{-λt} |A^{-δ}(u(t) - e^{-(t-t1)A} u(t1))|_{ℓ^p}`
/// for each window `w` on convolution-only paths and fits the exponent of `w`.
/// Passes when the exponent is positive.
#[allow(clippy::too_many_arguments)]
pub fn sup_increment_check(
    op: &SpectralOperator,
    ens: &Ensemble,
    delta: f64,
    delta_g: f64,
    p: f64,
    lambda: f64,
    t1: f64,
    windows: &[f64],
) -> Result<EstimateReport> {
    if !(delta > delta_g + 1.0 / p) {
        return Err(invalid(
            "delta",
            format!("{delta} must exceed delta_G + 1/p = {}", delta_g + 1.0 / p),
        ));
    }
    if windows.len() < 2 || windows.iter().any(|w| !(*w > 0.0)) {
        return Err(invalid("windows", "need at least two positive window sizes"));
    }
    if ens.is_empty() {
        return Err(invalid("ensemble", "no replicas"));
    }
    let weights: Vec<f64> = op.eigenvalues().iter().map(|r| r.powf(-delta)).collect();
    let norm = |u: &SpectralField, base: &SpectralField, t: f64| -> f64 {
        let v: Vec<f64> = u
            .coeffs()
            .iter()
            .zip(base.coeffs())
            .zip(op.eigenvalues())
            .zip(&weights)
            .map(|(((c, b), r), w)| w * (c - (-r * (t - t1)).exp() * b))
            .collect();
        (-lambda * t).exp() * SpectralField::new(v).lp(p)
    };
    let mut estimates = Vec::with_capacity(windows.len());
    for &w in windows {
        let mut acc = 0.0;
        for s in &ens.paths {
            let u = &s.u;
            let base = u.state_at(t1);
            let lo = u.times.partition_point(|&t| t <= t1);
            let hi = u.times.partition_point(|&t| t <= t1 + w);
            let mut sup: f64 = 0.0;
            for j in lo..hi {
                let t = u.times[j];
                sup = sup.max(norm(u.left_limit(j), base, t)).max(norm(&u.states[j], base, t));
            }
            if hi < u.len() {
                // Left limit at the first time past the window, which the path reaches continuously.
                let t = u.times[hi];
                if t - (t1 + w) <= 1e-12 * t.max(1.0) {
                    sup = sup.max(norm(u.left_limit(hi), base, t));
                }
            }
            acc += sup;
        }
        estimates.push(acc / ens.len() as f64);
    }
    let (exponent, passed) = if estimates.iter().all(|e| *e == 0.0) {
        (f64::INFINITY, true)
    } else if estimates.iter().any(|e| *e <= 0.0) {
        (f64::NAN, false)
    } else {
        let x: Vec<f64> = windows.iter().map(|w| w.ln()).collect();
        let y: Vec<f64> = estimates.iter().map(|e| e.ln()).collect();
        let (slope, _, _) = linear_fit(&x, &y);
        (slope, slope > 0.0)
    };
    Ok(EstimateReport {
        name: "stochastic convolution sup increment".into(),
        value: exponent,
        values: estimates,
        bound: Some(0.0),
        tolerance: 0.0,
        ci: None,
        passed,
        replicas: ens.len(),
        seeds: ens.seeds.clone(),
    })
}

/// Mean and variance of mode `mode` (1-based) of the linear equation
/// `du = -Au dt + σ dL̃` started from `x_i`, with `L̃` compensated of Lévy measure `ν`.
pub fn ou_oracle(
    op: &SpectralOperator,
    mode: usize,
    x_i: f64,
    sigma: f64,
    nu: &LevyMeasure,
    t: f64,
) -> Result<(f64, f64)> {
    if mode == 0 || mode > op.modes() {
        return Err(invalid("mode", format!("{mode} not in 1..={}", op.modes())));
    }
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let m2 = nu.second_moment()?;
    if !m2.is_finite() {
        return Err(Error::InfiniteMoment {
            p: 2.0,
            reason: "second moment of the Lévy measure is infinite".into(),
        });
    }
    let rho = op.rho(mode - 1);
    let mean = (-rho * t).exp() * x_i;
    let variance = sigma * sigma * m2 * -(-2.0 * rho * t).exp_m1() / (2.0 * rho);
    Ok((mean, variance))
}
