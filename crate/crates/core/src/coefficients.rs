//! Reaction (drift) and noise-amplitude (diffusion) coefficients.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::rng_from_seed;
use crate::spectral::{SpectralField, SpectralOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriftKind {
    /// `f(u) = -|u|^q sgn u + β u`.
    Poly,
    /// `f(u) = β u`.
    Linear,
    Zero,
}

fn default_q() -> f64 {
    3.0
}

fn default_k0() -> f64 {
    1.0
}

/// Nemytskii drift `F(u)(ξ) = f(u(ξ))` with optional clamp truncation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftSpec {
    pub kind: DriftKind,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default)]
    pub beta: f64,
    /// Truncation level `n` of `f_n(u) = f(clamp(u, -n, n))`.
    #[serde(default)]
    pub truncation: Option<u32>,
    /// Dissipativity rate `k`.
    #[serde(default)]
    pub k: f64,
    /// Growth constant `k₀` of `a(r) = k₀ (1 + r^q)`.
    #[serde(default = "default_k0")]
    pub k0: f64,
}

impl DriftSpec {
    pub fn poly(q: f64, beta: f64) -> Self {
        Self {
            kind: DriftKind::Poly,
            q,
            beta,
            truncation: None,
            k: 0.0,
            k0: 1.0,
        }
    }

    pub fn linear(beta: f64) -> Self {
        Self {
            kind: DriftKind::Linear,
            q: 1.0,
            beta,
            truncation: None,
            k: 0.0,
            k0: 1.0,
        }
    }

    pub fn zero() -> Self {
        Self {
            kind: DriftKind::Zero,
            q: 1.0,
            beta: 0.0,
            truncation: None,
            k: 0.0,
            k0: 0.0,
        }
    }

    pub fn truncated(mut self, n: u32) -> Self {
        self.truncation = Some(n);
        self
    }

    pub fn with_dissipativity(mut self, k: f64, k0: f64) -> Self {
        self.k = k;
        self.k0 = k0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q >= 1.0 && self.q.is_finite()) {
            return Err(invalid("q", format!("{} must be >= 1", self.q)));
        }
        if !self.beta.is_finite() || !self.k.is_finite() {
            return Err(invalid("beta", "beta and k must be finite"));
        }
        if !(self.k0 >= 0.0 && self.k0.is_finite()) {
            return Err(invalid("k0", format!("{} must be non-negative", self.k0)));
        }
        if self.truncation == Some(0) {
            return Err(invalid("truncation", "level must be positive"));
        }
        Ok(())
    }

    /// Untruncated scalar map `f`.
    pub fn f(&self, u: f64) -> f64 {
        match self.kind {
            DriftKind::Poly => -u.abs().powf(self.q).copysign(u) + self.beta * u,
            DriftKind::Linear => self.beta * u,
            DriftKind::Zero => 0.0,
        }
    }

    /// Scalar map actually applied: `f_n` when a truncation is set.
    pub fn scalar(&self, u: f64) -> f64 {
        match self.truncation {
            Some(n) => {
                let n = n as f64;
                self.f(u.clamp(-n, n))
            }
            None => self.f(u),
        }
    }

    /// `R_F^n = sup |f_n|`; infinite without truncation unless the drift is zero.
    pub fn truncation_bound(&self) -> f64 {
        let Some(n) = self.truncation else {
            return if self.kind == DriftKind::Zero { 0.0 } else { f64::INFINITY };
        };
        let n = n as f64;
        let mut cands = vec![n, -n, 0.0];
        if self.kind == DriftKind::Poly && self.beta > 0.0 && self.q > 1.0 {
            // Interior extremum of -u^q + βu.
            let u = (self.beta / self.q).powf(1.0 / (self.q - 1.0));
            if u < n {
                cands.extend([u, -u]);
            }
        }
        cands.into_iter().map(|u| self.f(u).abs()).fold(0.0, f64::max)
    }

    /// `a(r) = k₀ (1 + r^q)`.
    pub fn a(&self, r: f64) -> f64 {
        self.k0 * (1.0 + r.abs().powf(self.q))
    }

    pub fn apply_grid(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&u| self.scalar(u)).collect()
    }
}

/// `F(u)`: pointwise on the grid, projected back to coefficients.
pub fn drift_apply(op: &SpectralOperator, spec: &DriftSpec, u: &SpectralField) -> SpectralField {
    if spec.kind == DriftKind::Zero {
        return op.zero_field();
    }
    if spec.kind == DriftKind::Linear && spec.truncation.is_none() {
        return u.scale(spec.beta);
    }
    op.project(&spec.apply_grid(&op.reconstruct(u)))
}

/// Outcome of [`dissipativity_sample_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissipativityReport {
    pub samples: usize,
    pub constant: f64,
    /// `max (f(v+z) sgn v - K(1 + |z|^q))`; non-positive when the bound holds.
    pub max_excess: f64,
    /// A pair `(v, z)` attaining the largest excess when it is positive.
    pub witness: Option<(f64, f64)>,
    pub passed: bool,
}

/// `K(1 + |z|^q) - f(v+z) sgn v` with `K = k₀`.
pub fn dissipativity_slack(spec: &DriftSpec, v: f64, z: f64) -> f64 {
    let sgn = if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    };
    spec.k0 * (1.0 + z.abs().powf(spec.q)) - spec.scalar(v + z) * sgn
}

/// Checks `f(v+z) sgn v ≤ K(1 + |z|^q)` on a coarse grid of `[-range, range]²`
/// followed by `trials` uniform random pairs and small-magnitude pairs.
pub fn dissipativity_sample_check(spec: &DriftSpec, trials: usize, seed: u64, range: f64) -> DissipativityReport {
    let mut worst = f64::NEG_INFINITY;
    let mut witness = (0.0, 0.0);
    let mut samples = 0;
    let mut visit = |v: f64, z: f64| {
        let excess = -dissipativity_slack(spec, v, z);
        samples += 1;
        if excess > worst {
            worst = excess;
            witness = (v, z);
        }
    };
    let coarse = 201;
    for a in 0..coarse {
        for b in 0..coarse {
            let v = range * (2.0 * a as f64 / (coarse - 1) as f64 - 1.0);
            let z = range * (2.0 * b as f64 / (coarse - 1) as f64 - 1.0);
            visit(v, z);
        }
    }
    let mut rng = rng_from_seed(seed);
    for k in 0..trials {
        // Alternate between the full box and a log-uniform magnitude scale.
        let (v, z) = if k % 2 == 0 {
            (rng.random_range(-range..=range), rng.random_range(-range..=range))
        } else {
            let mag = |r: &mut crate::rng::SimRng| {
                let s: f64 = if r.random::<bool>() { 1.0 } else { -1.0 };
                s * 10f64.powf(r.random_range(-6.0..=range.log10().max(0.0)))
            };
            (mag(&mut rng), mag(&mut rng))
        };
        visit(v, z);
    }
    let passed = worst <= 0.0;
    DissipativityReport {
        samples,
        constant: spec.k0,
        max_excess: worst,
        witness: (!passed).then_some(witness),
        passed,
    }
}

/// `sup_grid |F_n(u) - F(u)|`.
pub fn truncation_consistency(op: &SpectralOperator, spec: &DriftSpec, u: &SpectralField) -> Result<f64> {
    truncation_consistency_grid(spec, &op.reconstruct(u))
}

pub fn truncation_consistency_grid(spec: &DriftSpec, values: &[f64]) -> Result<f64> {
    if spec.truncation.is_none() {
        return Err(invalid("truncation", "no truncation level set"));
    }
    Ok(values
        .iter()
        .map(|&u| (spec.scalar(u) - spec.f(u)).abs())
        .fold(0.0, f64::max))
}

/// Bounded noise amplitude `g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DiffusionSpec {
    Sin,
    /// `sin(u) sin(1/u) 1_{u ≠ 0}`.
    Sinsininv,
    Const { value: f64 },
    /// Piecewise-linear through `(knots, values)`, constant outside the knots.
    Tabulated { knots: Vec<f64>, values: Vec<f64> },
}

impl DiffusionSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            DiffusionSpec::Const { value } if !value.is_finite() => Err(invalid("value", "must be finite")),
            DiffusionSpec::Tabulated { knots, values } => {
                if knots.is_empty() || knots.len() != values.len() {
                    return Err(invalid("knots", "need matching nonempty knots and values"));
                }
                if knots.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid("knots", "knots must be strictly increasing"));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(invalid("values", "must be finite"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn g(&self, u: f64) -> f64 {
        match self {
            DiffusionSpec::Sin => u.sin(),
            DiffusionSpec::Sinsininv => {
                if u == 0.0 {
                    0.0
                } else {
                    u.sin() * (1.0 / u).sin()
                }
            }
            DiffusionSpec::Const { value } => *value,
            DiffusionSpec::Tabulated { knots, values } => {
                let k = knots.partition_point(|&x| x <= u);
                if k == 0 {
                    values[0]
                } else if k == knots.len() {
                    values[k - 1]
                } else {
                    let w = (u - knots[k - 1]) / (knots[k] - knots[k - 1]);
                    values[k - 1] + w * (values[k] - values[k - 1])
                }
            }
        }
    }

    /// `sup |g|`.
    pub fn bound(&self) -> f64 {
        match self {
            DiffusionSpec::Sin | DiffusionSpec::Sinsininv => 1.0,
            DiffusionSpec::Const { value } => value.abs(),
            DiffusionSpec::Tabulated { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self {
            DiffusionSpec::Const { value } => Some(*value),
            _ => None,
        }
    }
}

/// `g(u(ξ_j))` on the operator grid.
pub fn diffusion_apply(op: &SpectralOperator, spec: &DiffusionSpec, u: &SpectralField) -> Vec<f64> {
    if let Some(c) = spec.is_constant() {
        return vec![c; op.grid_len()];
    }
    op.reconstruct(u).into_iter().map(|v| spec.g(v)).collect()
}
