//! Compensated integrals against a Poisson random measure.

use super::measure::LevyMeasure;
use super::point::PointMeasure;
use crate::error::{Error, Result};
use crate::quad;

const TIME_RTOL: f64 = 1e-10;

/// `Σ_{t_k ∈ (a,b]} f(t_k, z_k)`.
pub fn atom_sum<F: Fn(f64, f64) -> f64>(pm: &PointMeasure<f64>, f: F, a: f64, b: f64) -> f64 {
    pm.window(a, b).iter().map(|x| f(x.t, x.mark)).sum()
}

/// `∫_a^b ∫ f(s, z) ν(dz) ds`.
pub fn compensator_term<F: Fn(f64, f64) -> f64>(nu: &LevyMeasure, f: F, a: f64, b: f64) -> Result<f64> {
    let non_finite = || Error::NonFiniteCompensator { a, b };
    if b <= a {
        return Ok(0.0);
    }
    let inner = |s: f64| nu.integrate(|z| f(s, z)).unwrap_or(f64::NAN);
    let v = quad::integrate(inner, a, b, 0.0, TIME_RTOL).map_err(|_| non_finite())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(non_finite())
    }
}

/// `∫_{(a,b]} ∫ f(s, z) η̃(dz, ds)` for a realisation `pm` of the measure with intensity `ν ⊗ ds`.
pub fn compensated_integral<F: Fn(f64, f64) -> f64>(
    pm: &PointMeasure<f64>,
    nu: &LevyMeasure,
    f: F,
    a: f64,
    b: f64,
) -> Result<f64> {
    let comp = compensator_term(nu, &f, a, b)?;
    Ok(atom_sum(pm, &f, a, b) - comp)
}

/// Càdlàg scalar path sampled at grid times and at every jump time.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ScalarPath {
    /// Right-continuous evaluation at `t ≥ times[0]`.
    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&s| s <= t);
        self.values[k.saturating_sub(1)]
    }
}

/// The compensated Lévy process `L(t) = ∫_0^t ∫ z η̃(dz, ds)` built from `pm`.
/// Between recorded times the path is the linear drift `-t ∫ z dν` plus the jumps so far.
pub fn levy_path_from_prm(pm: &PointMeasure<f64>, nu: &LevyMeasure, grid: &[f64]) -> Result<ScalarPath> {
    let drift = nu.mean_jump()?;
    let mut times: Vec<f64> = grid.iter().copied().chain(pm.atoms().iter().map(|a| a.t)).collect();
    times.push(0.0);
    times.sort_by(f64::total_cmp);
    times.dedup();
    let atoms = pm.atoms();
    let mut k = 0;
    let mut jumps = 0.0;
    let mut values = Vec::with_capacity(times.len());
    for &t in &times {
        while k < atoms.len() && atoms[k].t <= t {
            jumps += atoms[k].mark;
            k += 1;
        }
        values.push(jumps - t * drift);
    }
    Ok(ScalarPath { times, values })
}
