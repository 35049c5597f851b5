//! Parameter conditions of the existence results, evaluated with slack.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::noise::spectral_moment_sum;

/// Margin a strict inequality must clear to count as satisfied.
pub const SLACK_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `lhs < rhs`
    Less,
    /// `lhs ≤ rhs`
    LessEq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    /// `rhs - lhs`.
    pub slack: f64,
    /// Parameter-domain requirement rather than a hypothesis inequality.
    pub domain: bool,
    pub passed: bool,
}

impl Clause {
    fn new(name: &str, lhs: f64, relation: Relation, rhs: f64, domain: bool) -> Self {
        let slack = rhs - lhs;
        let passed = match relation {
            Relation::Less => slack > SLACK_TOL,
            Relation::LessEq => slack >= -SLACK_TOL,
        };
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            relation,
            slack,
            domain,
            passed: passed && !slack.is_nan(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub name: String,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub theorem: String,
    pub parameters: BTreeMap<String, f64>,
    pub clauses: Vec<Clause>,
    pub cross_checks: Vec<CrossCheck>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl HypothesisReport {
    fn new(theorem: &str, params: &[(&str, f64)], clauses: Vec<Clause>) -> Self {
        let passed = clauses.iter().all(|c| c.passed);
        Self {
            theorem: theorem.to_string(),
            parameters: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            clauses,
            cross_checks: Vec::new(),
            notes: Vec::new(),
            passed,
        }
    }

    pub fn clause(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }

    pub fn domain_violations(&self) -> Vec<&Clause> {
        self.clauses.iter().filter(|c| c.domain && !c.passed).collect()
    }
}

const SHIFT_NOTE: &str = "the operator condition is read as positivity of the spectrum, which holds for the \
     Dirichlet Laplacian and otherwise can be enforced by the shift A + nu0 I";

/// General existence result: `δ > max(δ_G + 1/p, δ_F - 1 + 1/p, δ_I)` with
/// `p ∈ (1, 2]`, `δ_G ∈ [0, 1/p)`, `δ_F ∈ [0, 1)`.
pub fn check_main(delta: f64, delta_f: f64, delta_g: f64, delta_i: f64, p: f64) -> HypothesisReport {
    let m = (delta_g + 1.0 / p).max(delta_f - 1.0 + 1.0 / p).max(delta_i);
    let clauses = vec![
        Clause::new("p > 1", 1.0, Relation::Less, p, true),
        Clause::new("p <= 2", p, Relation::LessEq, 2.0, true),
        Clause::new("delta_G >= 0", 0.0, Relation::LessEq, delta_g, true),
        Clause::new("delta_G < 1/p", delta_g, Relation::Less, 1.0 / p, true),
        Clause::new("delta_F >= 0", 0.0, Relation::LessEq, delta_f, true),
        Clause::new("delta_F < 1", delta_f, Relation::Less, 1.0, true),
        Clause::new(
            "max(delta_G + 1/p, delta_F - 1 + 1/p, delta_I) < delta",
            m,
            Relation::Less,
            delta,
            false,
        ),
    ];
    let mut r = HypothesisReport::new(
        "main",
        &[("delta", delta), ("delta_F", delta_f), ("delta_G", delta_g), ("delta_I", delta_i), ("p", p)],
        clauses,
    );
    r.notes.push(SHIFT_NOTE.to_string());
    r
}

/// `d/(2p)(α - 1/2 + 1/r) - 3/p + 3/q`, the right side of the first spectral-noise inequality.
pub fn ex01_rhs1(d: f64, p: f64, q: f64, r: f64, alpha: f64) -> f64 {
    d / (2.0 * p) * (alpha - 0.5 + 1.0 / r) - 3.0 / p + 3.0 / q
}

/// `d/(2p)(α - 1/2 + 1/p)`, the right side of the second spectral-noise inequality.
pub fn ex01_rhs2(d: f64, p: f64, alpha: f64) -> f64 {
    d / (2.0 * p) * (alpha - 0.5 + 1.0 / p)
}

/// Spectral-noise example: `d/r < d/(2p)(α - 1/2 + 1/r) - 3/p + 3/q` and
/// `δ + 2/p < d/(2p)(α - 1/2 + 1/p)`, with `r ≥ p`, `q ≥ p`.
pub fn check_ex01(d: f64, p: f64, q: f64, r: f64, alpha: f64, delta: f64) -> HypothesisReport {
    let clauses = vec![
        Clause::new("r >= p", p, Relation::LessEq, r, true),
        Clause::new("q >= p", p, Relation::LessEq, q, true),
        Clause::new("alpha > 0", 0.0, Relation::Less, alpha, true),
        Clause::new(
            "d/r < d/(2p)(alpha - 1/2 + 1/r) - 3/p + 3/q",
            d / r,
            Relation::Less,
            ex01_rhs1(d, p, q, r, alpha),
            false,
        ),
        Clause::new(
            "delta + 2/p < d/(2p)(alpha - 1/2 + 1/p)",
            delta + 2.0 / p,
            Relation::Less,
            ex01_rhs2(d, p, alpha),
            false,
        ),
    ];
    let mut rep = HypothesisReport::new(
        "spectral-noise",
        &[("d", d), ("p", p), ("q", q), ("r", r), ("alpha", alpha), ("delta", delta)],
        clauses,
    );
    rep.notes.push(SHIFT_NOTE.to_string());
    rep
}

/// Space–time noise example: `d < 2k/p + 4(1/q - 1/p)` and `γ > d - d/p`.
pub fn check_stpn(d: f64, k_order: u32, p: f64, q: f64, gamma: f64) -> HypothesisReport {
    let k = k_order as f64;
    let clauses = vec![
        Clause::new("k >= 1", 1.0, Relation::LessEq, k, true),
        Clause::new("p > 1", 1.0, Relation::Less, p, true),
        Clause::new("p <= 2", p, Relation::LessEq, 2.0, true),
        Clause::new("d < 2k/p + 4(1/q - 1/p)", d, Relation::Less, 2.0 * k / p + 4.0 * (1.0 / q - 1.0 / p), false),
        Clause::new("gamma > d - d/p", d - d / p, Relation::Less, gamma, false),
    ];
    let mut rep = HypothesisReport::new(
        "space-time-noise",
        &[("d", d), ("k", k), ("p", p), ("q", q), ("gamma", gamma)],
        clauses,
    );
    rep.notes.push(SHIFT_NOTE.to_string());
    rep
}

/// `1 + p(γ/d + 1/2 - 1/r)`.
pub fn claim_threshold(gamma: f64, d: f64, p: f64, r: f64) -> f64 {
    1.0 + p * (gamma / d + 0.5 - 1.0 / r)
}

/// Moment condition on the spectral weights: `α > 1 + p(γ/d + 1/2 - 1/r)`, `r ≥ 2`.
pub fn check_claim_spectral(alpha: f64, gamma: f64, d: f64, p: f64, r: f64) -> HypothesisReport {
    let clauses = vec![
        Clause::new("r >= 2", 2.0, Relation::LessEq, r, true),
        Clause::new(
            "alpha > 1 + p(gamma/d + 1/2 - 1/r)",
            claim_threshold(gamma, d, p, r),
            Relation::Less,
            alpha,
            false,
        ),
    ];
    let mut rep = HypothesisReport::new(
        "spectral-moment",
        &[("alpha", alpha), ("gamma", gamma), ("d", d), ("p", p), ("r", r)],
        clauses,
    );
    let sum = spectral_moment_sum(alpha, gamma, p, r, d, None);
    let main = rep.clauses.last().map(|c| c.passed).unwrap_or(false);
    rep.cross_checks.push(CrossCheck {
        name: "moment-sum convergence verdict".into(),
        agrees: sum.convergent == main,
    });
    rep
}
