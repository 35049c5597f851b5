use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::rng_from_seed;

/// Number of bootstrap resamples.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Outcome of one numerical check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub name: String,
    pub value: f64,
    /// Secondary computed values (per level, per window, ...).
    pub values: Vec<f64>,
    /// Oracle value or upper bound the value is compared with.
    pub bound: Option<f64>,
    pub tolerance: f64,
    /// 95% percentile-bootstrap interval for `value`.
    pub ci: Option<[f64; 2]>,
    pub passed: bool,
    pub replicas: usize,
    pub seeds: Vec<u64>,
}

impl EstimateReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// CSV table `name,value,bound,verdict`.
pub fn write_summary_csv<W: Write>(reports: &[EstimateReport], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["name", "value", "bound", "verdict"])?;
    for r in reports {
        out.write_record([
            r.name.clone(),
            format!("{:?}", r.value),
            r.bound.map(|b| format!("{b:?}")).unwrap_or_default(),
            if r.passed { "pass" } else { "fail" }.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bootstrap {
    pub estimate: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Percentile bootstrap of `stat` with [`BOOTSTRAP_RESAMPLES`] resamples.
pub fn bootstrap<F: Fn(&[f64]) -> f64>(samples: &[f64], seed: u64, stat: F) -> Bootstrap {
    let estimate = stat(samples);
    if samples.len() < 2 {
        return Bootstrap {
            estimate,
            std_error: 0.0,
            ci_low: estimate,
            ci_high: estimate,
        };
    }
    let mut rng = rng_from_seed(seed);
    let n = samples.len();
    let mut buf = vec![0.0; n];
    let mut stats: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            for b in buf.iter_mut() {
                *b = samples[rng.random_range(0..n)];
            }
            stat(&buf)
        })
        .collect();
    let m = stats.iter().sum::<f64>() / stats.len() as f64;
    let var = stats.iter().map(|s| (s - m).powi(2)).sum::<f64>() / (stats.len() - 1) as f64;
    stats.sort_by(f64::total_cmp);
    let q = |f: f64| stats[((f * (stats.len() - 1) as f64).round() as usize).min(stats.len() - 1)];
    Bootstrap {
        estimate,
        std_error: var.sqrt(),
        ci_low: q(0.025),
        ci_high: q(0.975),
    }
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with `n - 1` denominator.
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Least-squares line `y = slope x + intercept` and its `R²`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bootstrap_is_reproducible_and_brackets_mean() {
        let x: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let a = bootstrap(&x, 4, mean);
        let b = bootstrap(&x, 4, mean);
        assert_eq!(a, b);
        assert!(a.ci_low <= a.estimate && a.estimate <= a.ci_high);
        let se = (variance(&x) / 100.0).sqrt();
        assert!((a.std_error / se - 1.0).abs() < 0.3);
    }

    #[test]
    fn exact_line() {
        let (s, c, r2) = linear_fit(&[1.0, 2.0, 3.0], &[1.0, -1.0, -3.0]);
        assert!((s + 2.0).abs() < 1e-14 && (c - 3.0).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn summary_csv_layout() {
        let r = EstimateReport {
            name: "x".into(),
            value: 1.5,
            values: vec![],
            bound: Some(2.0),
            tolerance: 0.0,
            ci: None,
            passed: true,
            replicas: 1,
            seeds: vec![1],
        };
        let mut buf = Vec::new();
        write_summary_csv(&[r], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "name,value,bound,verdict\nx,1.5,2.0,pass\n");
    }
}
