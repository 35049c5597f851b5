//! `Λ^{-α} f (t) = Γ(α)^{-1} ∫_0^t (t-s)^{α-1} e^{-(t-s)A} f(s) ds`.

use statrs::function::gamma::{gamma_lr, gamma_ur};

use crate::error::{invalid, Result};
use crate::spectral::{PathRecord, SpectralField, SpectralOperator};

/// `Γ(α)^{-1} ∫_{x1}^{x2} x^{α-1} e^{-ρx} dx = ρ^{-α}[P(α, ρx2) - P(α, ρx1)]`.
fn kernel_mass(alpha: f64, rho: f64, x1: f64, x2: f64) -> f64 {
    if x2 <= x1 {
        return 0.0;
    }
    let (a, b) = (rho * x1, rho * x2);
    // Take differences of the smaller tail to avoid cancellation.
    let diff = if a > alpha {
        gamma_ur(alpha, a) - gamma_ur(alpha, b)
    } else if a == 0.0 {
        gamma_lr(alpha, b)
    } else {
        gamma_lr(alpha, b) - gamma_lr(alpha, a)
    };
    rho.powf(-alpha) * diff
}

/// Applies `Λ^{-α}` to `f`, read as piecewise constant with value `f(t_k)` on
/// `[t_k, t_{k+1})`. The singular kernel is integrated exactly over every interval.
/// The result is recorded at the same times as `f`.
pub fn lambda_frac_inverse(op: &SpectralOperator, alpha: f64, f: &PathRecord) -> Result<PathRecord> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid("alpha", format!("{alpha} must lie in (0, 1]")));
    }
    if f.is_empty() {
        return Err(invalid("f", "empty path"));
    }
    let times = &f.times;
    let m = times.len();
    let modes = f.modes().min(op.modes());
    let steps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    let uniform = steps
        .first()
        .is_some_and(|h0| steps.iter().all(|h| (h - h0).abs() <= 1e-12 * h0));
    let mut out = vec![vec![0.0; modes]; m];
    for i in 0..modes {
        let rho = op.rho(i);
        if uniform {
            // Masses depend only on the lag, so tabulate the CDF once.
            let h = steps[0];
            let cdf: Vec<f64> = (0..m).map(|j| kernel_mass(alpha, rho, 0.0, j as f64 * h)).collect();
            let w: Vec<f64> = (1..m).map(|j| cdf[j] - cdf[j - 1]).collect();
            for (mi, row) in out.iter_mut().enumerate().skip(1) {
                let mut acc = 0.0;
                for k in 0..mi {
                    acc += w[mi - 1 - k] * f.states[k].coeffs()[i];
                }
                row[i] = acc;
            }
        } else {
            for mi in 1..m {
                let t = times[mi];
                let mut acc = 0.0;
                for k in 0..mi {
                    acc += kernel_mass(alpha, rho, t - times[k + 1], t - times[k]) * f.states[k].coeffs()[i];
                }
                out[mi][i] = acc;
            }
        }
    }
    PathRecord::from_samples(times.clone(), out.into_iter().map(SpectralField::new).collect())
}
