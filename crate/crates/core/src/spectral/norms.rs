//! Semigroup, fractional powers and the norms used in the estimates.

use serde::{Deserialize, Serialize};

use super::field::{PathRecord, SpectralField};
use super::operator::SpectralOperator;
use crate::error::{invalid, Error, Result};

/// Nodes of the log-spaced rule in [`interp_norm`].
pub const INTERP_NODES: usize = 64;
/// Lower end of the `t`-range in [`interp_norm`].
pub const INTERP_T_MIN: f64 = 1e-8;

/// `e^{-tA} u`.
pub fn semigroup_apply(op: &SpectralOperator, t: f64, u: &SpectralField) -> Result<SpectralField> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(SpectralField::new(
        u.coeffs()
            .iter()
            .zip(op.eigenvalues())
            .map(|(c, r)| c * (-r * t).exp())
            .collect(),
    ))
}

/// `A^γ u`.
pub fn frac_power_apply(op: &SpectralOperator, gamma: f64, u: &SpectralField) -> SpectralField {
    if gamma == 0.0 {
        return u.clone();
    }
    SpectralField::new(
        u.coeffs()
            .iter()
            .zip(op.eigenvalues())
            .map(|(c, r)| c * r.powf(gamma))
            .collect(),
    )
}

/// Which state-space norm to evaluate.
///
/// `B` is the coefficient `ℓ^p` norm, `E` the interpolation norm of
/// [`interp_norm`], `X` the weighted norm `(Σ |ρ_i^{δ(1-θ)} c_i|^p)^{1/p}`
/// (exact only for `p = 2`), and `Sup` the maximum of the grid values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NormKind {
    B { p: f64 },
    E { delta: f64, p: f64 },
    X { delta: f64, theta: f64, p: f64 },
    Sup,
}

impl NormKind {
    pub fn validate(&self) -> Result<()> {
        let check_p = |p: f64| {
            if p >= 1.0 && p.is_finite() {
                Ok(())
            } else {
                Err(invalid("p", format!("norm exponent {p} must be in [1, inf)")))
            }
        };
        match *self {
            NormKind::B { p } => check_p(p),
            NormKind::E { delta, p } => {
                check_p(p)?;
                if delta > 0.0 && delta < 1.0 {
                    Ok(())
                } else {
                    Err(invalid("delta", format!("{delta} must lie in (0, 1)")))
                }
            }
            NormKind::X { theta, p, .. } => {
                check_p(p)?;
                if (0.0..=1.0).contains(&theta) {
                    Ok(())
                } else {
                    Err(invalid("theta", format!("{theta} must lie in [0, 1]")))
                }
            }
            NormKind::Sup => Ok(()),
        }
    }

    pub fn eval(&self, op: &SpectralOperator, u: &SpectralField) -> f64 {
        match *self {
            NormKind::B { p } => u.lp(p),
            NormKind::E { delta, p } => interp_norm(op, u, delta, p),
            NormKind::X { delta, theta, p } => {
                let w = delta * (1.0 - theta);
                SpectralField::new(
                    u.coeffs()
                        .iter()
                        .zip(op.eigenvalues())
                        .map(|(c, r)| c * r.powf(w))
                        .collect(),
                )
                .lp(p)
            }
            NormKind::Sup => op.reconstruct(u).iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }
}

/// `|u|_B + (∫_0^1 (t^{1-δ} |A e^{-tA} u|_B)^p dt/t)^{1/p}`, with the integral
/// evaluated by the trapezoidal rule in `ln t` on [`INTERP_NODES`] nodes of
/// `[INTERP_T_MIN, 1]`. On `(0, INTERP_T_MIN)` the norm factor is frozen at its
/// value at the lowest node and `t^{p(1-δ)-1}` is integrated exactly.
pub fn interp_norm(op: &SpectralOperator, u: &SpectralField, delta: f64, p: f64) -> f64 {
    let base = u.lp(p);
    if base == 0.0 {
        return 0.0;
    }
    let ln_lo = INTERP_T_MIN.ln();
    let h = -ln_lo / (INTERP_NODES - 1) as f64;
    let mut acc = 0.0;
    let mut head = 0.0;
    let mut scratch = vec![0.0; u.len()];
    for k in 0..INTERP_NODES {
        let t = (ln_lo + k as f64 * h).exp();
        for ((s, c), r) in scratch.iter_mut().zip(u.coeffs()).zip(op.eigenvalues()) {
            *s = r * (-r * t).exp() * c;
        }
        let a = scratch.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
        let w = if k == 0 || k == INTERP_NODES - 1 { 0.5 } else { 1.0 };
        let term = (t.powf(1.0 - delta) * a).powf(p);
        if k == 0 {
            head = term / (p * (1.0 - delta));
        }
        acc += w * term;
    }
    base + (acc * h + head).powf(1.0 / p)
}

/// `∫ e^{-λt} |u(t)|^p dt` over the recorded horizon. On each interval
/// `[t_k, t_{k+1})` the norm part is interpolated log-linearly between its value
/// at `t_k` and at the left limit at `t_{k+1}` (linearly if either vanishes), so
/// exponentially decaying paths are integrated exactly.
pub fn lp_lambda_integral(op: &SpectralOperator, path: &PathRecord, p: f64, lambda: f64, kind: NormKind) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveWeight(lambda));
    }
    if path.is_empty() {
        return Err(invalid("path", "empty path"));
    }
    let mut acc = 0.0;
    for k in 0..path.len() - 1 {
        let (a, b) = (path.times[k], path.times[k + 1]);
        let ua = kind.eval(op, &path.states[k]).powf(p);
        let ub = kind.eval(op, path.left_limit(k + 1)).powf(p);
        acc += interval_weighted(lambda, a, b, ua, ub);
    }
    Ok(acc)
}

/// `∫_a^b e^{-λt} g(t) dt` with `g` log-linear from `ga` to `gb`.
pub(crate) fn interval_weighted(lambda: f64, a: f64, b: f64, ga: f64, gb: f64) -> f64 {
    let tau = b - a;
    if ga > 0.0 && gb > 0.0 && tau > 0.0 {
        let kappa = (ga / gb).ln() / tau;
        let x = (lambda + kappa) * tau;
        let e1 = if x.abs() < 1e-8 { 1.0 - 0.5 * x } else { -(-x).exp_m1() / x };
        ga * (-lambda * a).exp() * tau * e1
    } else {
        0.5 * (ga + gb) * exp_weight(lambda, a, b)
    }
}

/// `(∫ e^{-λt} |u(t)|^p dt)^{1/p}`.
pub fn lp_lambda_norm(op: &SpectralOperator, path: &PathRecord, p: f64, lambda: f64, kind: NormKind) -> Result<f64> {
    Ok(lp_lambda_integral(op, path, p, lambda, kind)?.powf(1.0 / p))
}

/// `∫_a^b e^{-λt} dt`.
pub(crate) fn exp_weight(lambda: f64, a: f64, b: f64) -> f64 {
    (-lambda * a).exp() * -(-lambda * (b - a)).exp_m1() / lambda
}

/// Weighted Gagliardo seminorm of a recorded path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GagliardoNorm {
    pub value: f64,
    /// `value^p`.
    pub pth_power: f64,
    /// Shortest recorded interval; pairs closer than this are not resolved.
    pub band: f64,
}

/// `(∫∫ e^{-λ(t+s)} |u(t) - u(s)|^p / |t - s|^{1+αp} ds dt)^{1/p}` on the recorded horizon.
///
/// The path is represented by one vector per recorded interval (mean of the
/// right value at the start and the left limit at the end). The kernel is
/// integrated exactly over each pair of intervals and the exponential weight
/// is replaced by its interval averages. Same-interval pairs contribute zero.
pub fn w_alpha_p_norm(
    op: &SpectralOperator,
    path: &PathRecord,
    alpha: f64,
    p: f64,
    lambda: f64,
    kind: NormKind,
) -> Result<GagliardoNorm> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", format!("{alpha} must lie in (0, 1)")));
    }
    if path.len() < 2 {
        return Err(invalid("path", "at least two recorded times are required"));
    }
    let beta = 1.0 + alpha * p;
    let cells = path.len() - 1;
    let reps: Vec<SpectralField> = (0..cells)
        .map(|k| {
            let mut v = path.states[k].clone();
            v += path.left_limit(k + 1);
            v.scale(0.5)
        })
        .collect();
    let bounds: Vec<(f64, f64)> = (0..cells).map(|k| (path.times[k], path.times[k + 1])).collect();
    let weights: Vec<f64> = bounds
        .iter()
        .map(|&(a, b)| if lambda == 0.0 { 1.0 } else { exp_weight(lambda, a, b) / (b - a) })
        .collect();
    let band = bounds.iter().map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
    let mut acc = 0.0;
    for k in 0..cells {
        for l in k + 1..cells {
            let diff = kind.eval(op, &(&reps[l] - &reps[k]));
            if diff == 0.0 {
                continue;
            }
            let kern = kernel_integral(beta, bounds[k], bounds[l]);
            acc += 2.0 * weights[k] * weights[l] * diff.powf(p) * kern;
        }
    }
    Ok(GagliardoNorm {
        value: acc.powf(1.0 / p),
        pth_power: acc,
        band,
    })
}

/// `∫_a^b ∫_c^d (s - t)^{-β} ds dt` for `b ≤ c`.
fn kernel_integral(beta: f64, (a, b): (f64, f64), (c, d): (f64, f64)) -> f64 {
    let g = |x: f64| {
        if x <= 0.0 {
            if beta < 2.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else if (beta - 2.0).abs() < 1e-12 {
            -x.ln()
        } else if (beta - 1.0).abs() < 1e-12 {
            x * x.ln()
        } else {
            x.powf(2.0 - beta) / ((1.0 - beta) * (2.0 - beta))
        }
    };
    let v = g(d - a) - g(d - b) - g(c - a) + g(c - b);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}
