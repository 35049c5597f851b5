//! Jump intensity measures on the real line.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quad;

/// Relative tolerance used for every moment computed by quadrature.
pub const MOMENT_RTOL: f64 = 1e-9;

/// Fraction of the untruncated p-moment allowed below the default small-jump cutoff.
pub const DEFAULT_DISCARD_FRACTION: f64 = 1e-6;

/// A point mass of a finite-atomic measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub z: f64,
    pub mass: f64,
}

/// Intensity measure ν of the jump sizes.
///
/// Infinite-activity kinds are stored together with their small-jump cutoff ε;
/// every quantity computed from the measure (mass, moments, samples) refers to
/// the truncated measure `ν|_{|z| ≥ ε}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LevyMeasure {
    FiniteAtomic { atoms: Vec<PointMass> },
    /// Constant density `height` on `[lo, hi]`.
    DensityOnInterval { lo: f64, hi: f64, height: f64 },
    /// Density `c_± e^{-decay_± |z|} / |z|^{1+index}` on each half line, cut at `|z| ≥ epsilon`.
    TemperedPowerLaw {
        c_pos: f64,
        c_neg: f64,
        index: f64,
        decay_pos: f64,
        decay_neg: f64,
        epsilon: f64,
    },
}

impl LevyMeasure {
    pub fn null() -> Self {
        LevyMeasure::FiniteAtomic { atoms: Vec::new() }
    }

    pub fn atom(z: f64, mass: f64) -> Result<Self> {
        Self::atomic(vec![PointMass { z, mass }])
    }

    pub fn atomic(atoms: Vec<PointMass>) -> Result<Self> {
        let nu = LevyMeasure::FiniteAtomic { atoms };
        nu.validate()?;
        Ok(nu)
    }

    /// Symmetric two-point measure `mass/2 (δ_{-z} + δ_z)`.
    pub fn symmetric_pair(z: f64, mass: f64) -> Result<Self> {
        Self::atomic(vec![
            PointMass { z: -z, mass: 0.5 * mass },
            PointMass { z, mass: 0.5 * mass },
        ])
    }

    pub fn uniform(lo: f64, hi: f64, height: f64) -> Result<Self> {
        let nu = LevyMeasure::DensityOnInterval { lo, hi, height };
        nu.validate()?;
        Ok(nu)
    }

    /// Tempered power law with an explicit cutoff.
    pub fn tempered(
        c_pos: f64,
        c_neg: f64,
        index: f64,
        decay_pos: f64,
        decay_neg: f64,
        epsilon: f64,
    ) -> Result<Self> {
        let nu = LevyMeasure::TemperedPowerLaw {
            c_pos,
            c_neg,
            index,
            decay_pos,
            decay_neg,
            epsilon,
        };
        nu.validate()?;
        Ok(nu)
    }

    /// Tempered power law whose cutoff discards less than
    /// [`DEFAULT_DISCARD_FRACTION`] of the untruncated p-moment.
    pub fn tempered_with_default_cutoff(
        c_pos: f64,
        c_neg: f64,
        index: f64,
        decay_pos: f64,
        decay_neg: f64,
        p: f64,
    ) -> Result<Self> {
        if p <= index {
            return Err(invalid(
                "p",
                format!("p = {p} must exceed the stability index {index} for a finite small-jump moment"),
            ));
        }
        let full = untruncated_tempered_moment(c_pos, decay_pos, index, p)?
            + untruncated_tempered_moment(c_neg, decay_neg, index, p)?;
        // ∫_{0<|z|<ε} |z|^p ν(dz) ≤ (c_+ + c_-) ε^{p-α} / (p-α)
        let c = c_pos + c_neg;
        let epsilon = if c == 0.0 {
            1.0
        } else {
            (DEFAULT_DISCARD_FRACTION * full * (p - index) / c).powf(1.0 / (p - index))
        };
        Self::tempered(c_pos, c_neg, index, decay_pos, decay_neg, epsilon)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LevyMeasure::FiniteAtomic { atoms } => {
                for a in atoms {
                    if !a.z.is_finite() || a.z == 0.0 {
                        return Err(invalid("atoms", format!("atom location {} must be finite and non-zero", a.z)));
                    }
                    if !(a.mass.is_finite() && a.mass >= 0.0) {
                        return Err(invalid("atoms", format!("atom mass {} must be finite and non-negative", a.mass)));
                    }
                }
            }
            LevyMeasure::DensityOnInterval { lo, hi, height } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(invalid("support", format!("need finite lo < hi, got [{lo}, {hi}]")));
                }
                if !(height.is_finite() && *height >= 0.0) {
                    return Err(invalid("height", format!("{height}")));
                }
            }
            LevyMeasure::TemperedPowerLaw {
                c_pos,
                c_neg,
                index,
                decay_pos,
                decay_neg,
                epsilon,
            } => {
                for (name, v) in [("c_pos", c_pos), ("c_neg", c_neg), ("decay_pos", decay_pos), ("decay_neg", decay_neg)] {
                    if !(v.is_finite() && *v >= 0.0) {
                        return Err(invalid(name, format!("{v} must be finite and non-negative")));
                    }
                }
                if !(*index > 0.0 && *index < 2.0) {
                    return Err(invalid("index", format!("{index} must lie in (0, 2)")));
                }
                if !(epsilon.is_finite() && *epsilon > 0.0) {
                    return Err(invalid("epsilon", format!("{epsilon} must be positive")));
                }
            }
        }
        Ok(())
    }

    /// Small-jump cutoff; zero for finite-activity kinds.
    pub fn truncation_epsilon(&self) -> f64 {
        match self {
            LevyMeasure::TemperedPowerLaw { epsilon, .. } => *epsilon,
            _ => 0.0,
        }
    }

    /// Total mass of the truncated measure.
    pub fn total_mass(&self) -> f64 {
        match self {
            LevyMeasure::FiniteAtomic { atoms } => atoms.iter().map(|a| a.mass).sum(),
            LevyMeasure::DensityOnInterval { lo, hi, height } => height * (hi - lo),
            LevyMeasure::TemperedPowerLaw { .. } => {
                let (pos, neg) = self.tempered_side_masses();
                pos + neg
            }
        }
    }

    /// `∫ |z|^p ν(dz)` over the truncated support.
    pub fn abs_moment(&self, p: f64) -> Result<f64> {
        match self {
            LevyMeasure::FiniteAtomic { atoms } => Ok(atoms.iter().map(|a| a.mass * a.z.abs().powf(p)).sum()),
            LevyMeasure::DensityOnInterval { .. } => self.integrate(|z| z.abs().powf(p)),
            LevyMeasure::TemperedPowerLaw {
                c_pos,
                c_neg,
                index,
                decay_pos,
                decay_neg,
                epsilon,
            } => Ok(tempered_side_moment(*c_pos, *decay_pos, *index, *epsilon, p)?
                + tempered_side_moment(*c_neg, *decay_neg, *index, *epsilon, p)?),
        }
    }

    /// `C_ν = ∫ |z|^p ν(dz)` for `p ∈ (1, 2]`.
    pub fn total_p_moment(&self, p: f64) -> Result<f64> {
        if !(p > 1.0 && p <= 2.0) {
            return Err(invalid("p", format!("{p} must lie in (1, 2]")));
        }
        self.abs_moment(p)
    }

    /// `∫ z ν(dz)`, the drift removed by compensation.
    pub fn mean_jump(&self) -> Result<f64> {
        match self {
            LevyMeasure::FiniteAtomic { atoms } => Ok(atoms.iter().map(|a| a.mass * a.z).sum()),
            LevyMeasure::DensityOnInterval { lo, hi, height } => Ok(0.5 * height * (hi * hi - lo * lo)),
            LevyMeasure::TemperedPowerLaw {
                c_pos,
                c_neg,
                index,
                decay_pos,
                decay_neg,
                epsilon,
            } => Ok(tempered_side_moment(*c_pos, *decay_pos, *index, *epsilon, 1.0)?
                - tempered_side_moment(*c_neg, *decay_neg, *index, *epsilon, 1.0)?),
        }
    }

    pub fn second_moment(&self) -> Result<f64> {
        self.abs_moment(2.0)
    }

    /// `ν([lo, hi))`.
    pub fn mass_of(&self, lo: f64, hi: f64) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        match self {
            LevyMeasure::FiniteAtomic { atoms } => Ok(atoms
                .iter()
                .filter(|a| a.z >= lo && a.z < hi)
                .map(|a| a.mass)
                .sum()),
            LevyMeasure::DensityOnInterval { lo: a, hi: b, height } => {
                Ok(height * (hi.min(*b) - lo.max(*a)).max(0.0))
            }
            LevyMeasure::TemperedPowerLaw { .. } => self.integrate_range(|_| 1.0, lo, hi),
        }
    }

    /// `∫ f dν` over the truncated support.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        self.integrate_range(f, f64::NEG_INFINITY, f64::INFINITY)
    }

    /// `∫_{[lo, hi)} f dν`.
    pub fn integrate_range<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        match self {
            LevyMeasure::FiniteAtomic { atoms } => Ok(atoms
                .iter()
                .filter(|a| a.z >= lo && a.z < hi)
                .map(|a| a.mass * f(a.z))
                .sum()),
            LevyMeasure::DensityOnInterval { lo: a, hi: b, height } => {
                let (a, b) = (lo.max(*a), hi.min(*b));
                if a >= b || *height == 0.0 {
                    return Ok(0.0);
                }
                // Split at the origin where |z|^p style integrands have a kink.
                let mut total = 0.0;
                if a < 0.0 && b > 0.0 {
                    total += quad::integrate(&f, a, 0.0, 0.0, MOMENT_RTOL)?;
                    total += quad::integrate(&f, 0.0, b, 0.0, MOMENT_RTOL)?;
                } else {
                    total += quad::integrate(&f, a, b, 0.0, MOMENT_RTOL)?;
                }
                Ok(height * total)
            }
            LevyMeasure::TemperedPowerLaw {
                c_pos,
                c_neg,
                index,
                decay_pos,
                decay_neg,
                epsilon,
            } => {
                let pos = tempered_side_integral(&f, *c_pos, *decay_pos, *index, lo.max(*epsilon), hi)?;
                let neg = tempered_side_integral(|z| f(-z), *c_neg, *decay_neg, *index, (-hi).max(*epsilon), -lo)?;
                Ok(pos + neg)
            }
        }
    }

    /// Draws one mark from `ν / ν(ℝ)`. Must not be called on the null measure.
    pub fn sample_mark<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            LevyMeasure::FiniteAtomic { atoms } => {
                let total: f64 = atoms.iter().map(|a| a.mass).sum();
                let mut u = rng.random::<f64>() * total;
                for a in atoms {
                    if u < a.mass {
                        return a.z;
                    }
                    u -= a.mass;
                }
                atoms.iter().rev().find(|a| a.mass > 0.0).map(|a| a.z).unwrap_or(0.0)
            }
            LevyMeasure::DensityOnInterval { lo, hi, .. } => lo + (hi - lo) * rng.random::<f64>(),
            LevyMeasure::TemperedPowerLaw {
                index,
                decay_pos,
                decay_neg,
                epsilon,
                ..
            } => {
                let (pos, neg) = self.tempered_side_masses();
                let positive = rng.random::<f64>() * (pos + neg) < pos;
                let decay = if positive { *decay_pos } else { *decay_neg };
                // Pareto proposal thinned by the exponential tempering.
                let z = loop {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    let z = epsilon * u.powf(-1.0 / index);
                    if decay == 0.0 || rng.random::<f64>() < (-decay * (z - epsilon)).exp() {
                        break z;
                    }
                };
                if positive {
                    z
                } else {
                    -z
                }
            }
        }
    }

    /// Compact one-line descriptor used in file headers.
    pub fn descriptor(&self) -> String {
        serde_json::to_string(self).expect("measure serialises")
    }

    fn tempered_side_masses(&self) -> (f64, f64) {
        match self {
            LevyMeasure::TemperedPowerLaw {
                c_pos,
                c_neg,
                index,
                decay_pos,
                decay_neg,
                epsilon,
            } => (
                tempered_side_moment(*c_pos, *decay_pos, *index, *epsilon, 0.0).unwrap_or(f64::INFINITY),
                tempered_side_moment(*c_neg, *decay_neg, *index, *epsilon, 0.0).unwrap_or(f64::INFINITY),
            ),
            _ => (0.0, 0.0),
        }
    }
}

/// `∫_ε^∞ z^p c e^{-decay z} z^{-1-index} dz`.
fn tempered_side_moment(c: f64, decay: f64, index: f64, epsilon: f64, p: f64) -> Result<f64> {
    if c == 0.0 {
        return Ok(0.0);
    }
    if decay == 0.0 {
        if p >= index {
            return Err(Error::InfiniteMoment {
                p,
                reason: format!("untempered tail with index {index} has no moment of order {p}"),
            });
        }
        return Ok(c * epsilon.powf(p - index) / (index - p));
    }
    tempered_side_integral(|z| z.powf(p), c, decay, index, epsilon, f64::INFINITY)
}

/// `∫_a^b f(z) c e^{-decay z} z^{-1-index} dz` for `ε ≤ a < b ≤ ∞`, evaluated
/// after the substitution `z = a/u`, which maps the tail onto `(a/b, 1]`.
fn tempered_side_integral<F: Fn(f64) -> f64>(f: F, c: f64, decay: f64, index: f64, a: f64, b: f64) -> Result<f64> {
    if c == 0.0 || b <= a {
        return Ok(0.0);
    }
    let u_lo = if b.is_infinite() { 0.0 } else { a / b };
    let scale = c * a.powf(-index);
    let integrand = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let z = a / u;
        let damp = (-decay * z).exp();
        if damp == 0.0 {
            return 0.0;
        }
        u.powf(index - 1.0) * damp * f(z)
    };
    let v = quad::integrate(integrand, u_lo, 1.0, 0.0, MOMENT_RTOL)?;
    if !v.is_finite() {
        return Err(Error::InfiniteMoment {
            p: f64::NAN,
            reason: "tempered tail integral diverged".into(),
        });
    }
    Ok(scale * v)
}

/// `∫_0^∞ z^p c e^{-decay z} z^{-1-index} dz = c Γ(p-index) decay^{index-p}`.
fn untruncated_tempered_moment(c: f64, decay: f64, index: f64, p: f64) -> Result<f64> {
    if c == 0.0 {
        return Ok(0.0);
    }
    if decay == 0.0 {
        return Err(Error::InfiniteMoment {
            p,
            reason: "untempered power law has an infinite p-moment over the whole line".into(),
        });
    }
    Ok(c * statrs::function::gamma::gamma(p - index) * decay.powf(index - p))
}

/// Compensator `ν ⊗ Lebesgue` of a time-homogeneous Poisson random measure.
#[derive(Clone, Debug, PartialEq)]
pub struct CompensatorSpec {
    pub measure: LevyMeasure,
}

impl CompensatorSpec {
    pub fn new(measure: LevyMeasure) -> Self {
        Self { measure }
    }

    /// `γ([lo, hi) × (a, b]) = ν([lo, hi)) (b - a)`.
    pub fn evaluate(&self, lo: f64, hi: f64, a: f64, b: f64) -> Result<f64> {
        Ok(self.measure.mass_of(lo, hi)? * (b - a).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn atomic_moments() {
        assert_eq!(LevyMeasure::atom(1.0, 1.0).unwrap().total_p_moment(2.0).unwrap(), 1.0);
        assert_eq!(LevyMeasure::atom(-3.0, 1.0).unwrap().total_p_moment(2.0).unwrap(), 9.0);
    }

    #[test]
    fn uniform_p_moment_matches_antiderivative() {
        let nu = LevyMeasure::uniform(-1.0, 1.0, 1.0).unwrap();
        let v = nu.total_p_moment(1.5).unwrap();
        // 2 ∫_0^1 z^{3/2} dz = 2 / 2.5
        assert!((v - 0.8).abs() < 1e-9 * 0.8, "{v}");
    }

    #[test]
    fn p_outside_range_is_rejected() {
        let nu = LevyMeasure::atom(1.0, 1.0).unwrap();
        assert!(nu.total_p_moment(1.0).is_err());
        assert!(nu.total_p_moment(2.5).is_err());
    }

    #[test]
    fn untempered_tail_reports_infinite_moment() {
        let nu = LevyMeasure::tempered(1.0, 1.0, 1.2, 0.0, 0.0, 0.1).unwrap();
        match nu.total_p_moment(1.5) {
            Err(Error::InfiniteMoment { .. }) => {}
            other => panic!("expected infinite moment, got {other:?}"),
        }
        // Moments below the index exist and have closed forms.
        let m = nu.abs_moment(1.0).unwrap();
        let exact = 2.0 * 0.1f64.powf(1.0 - 1.2) / 0.2;
        assert!((m - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn tempered_mass_matches_series_oracle() {
        // ∫_ε^∞ e^{-z} z^{-1.5} dz, checked against the incomplete-gamma identity
        // Γ(-1/2, ε) = (2 e^{-ε}/√ε - 2 Γ(1/2, ε)) .
        let eps = 0.05;
        let nu = LevyMeasure::tempered(1.0, 0.0, 0.5, 1.0, 0.0, eps).unwrap();
        let upper_half = statrs::function::gamma::gamma_ur(0.5, eps) * std::f64::consts::PI.sqrt();
        let exact = 2.0 * (-eps).exp() / eps.sqrt() - 2.0 * upper_half;
        let m = nu.total_mass();
        assert!((m - exact).abs() < 1e-8 * exact, "{m} vs {exact}");
    }

    #[test]
    fn default_cutoff_discards_tiny_fraction() {
        let p = 1.5;
        let nu = LevyMeasure::tempered_with_default_cutoff(1.0, 1.0, 0.8, 2.0, 2.0, p).unwrap();
        let eps = nu.truncation_epsilon();
        let full = 2.0 * statrs::function::gamma::gamma(p - 0.8) * 2f64.powf(0.8 - p);
        let kept = nu.total_p_moment(p).unwrap();
        let discarded = full - kept;
        assert!(eps > 0.0);
        assert!(discarded >= 0.0);
        assert!(discarded < 1e-6 * full, "discarded {discarded} of {full}");
    }

    #[test]
    fn tempered_sampler_matches_mass_split() {
        let nu = LevyMeasure::tempered(2.0, 1.0, 0.7, 1.0, 3.0, 0.01).unwrap();
        let mut rng = rng_from_seed(3);
        let n = 40_000;
        let mut pos = 0usize;
        let mut above_one = 0usize;
        for _ in 0..n {
            let z = nu.sample_mark(&mut rng);
            assert!(z.abs() >= 0.01);
            pos += (z > 0.0) as usize;
            above_one += (z >= 1.0) as usize;
        }
        let m = nu.total_mass();
        let expected_pos = nu.mass_of(0.0, f64::INFINITY).unwrap() / m;
        let expected_above = nu.mass_of(1.0, f64::INFINITY).unwrap() / m;
        let tol = |q: f64| 4.0 * (q * (1.0 - q) / n as f64).sqrt();
        assert!((pos as f64 / n as f64 - expected_pos).abs() < tol(expected_pos));
        assert!((above_one as f64 / n as f64 - expected_above).abs() < tol(expected_above));
    }

    #[test]
    fn compensator_is_product_measure() {
        let nu = LevyMeasure::uniform(-2.0, 2.0, 0.5).unwrap();
        let c = CompensatorSpec::new(nu);
        assert!((c.evaluate(0.0, 1.0, 1.0, 4.0).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn zero_atom_rejected() {
        assert!(LevyMeasure::atom(0.0, 1.0).is_err());
        assert!(LevyMeasure::uniform(1.0, 1.0, 1.0).is_err());
        assert!(LevyMeasure::tempered(1.0, 1.0, 2.5, 1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn descriptor_round_trips() {
        let nu = LevyMeasure::symmetric_pair(0.5, 3.0).unwrap();
        let back: LevyMeasure = serde_json::from_str(&nu.descriptor()).unwrap();
        assert_eq!(back, nu);
    }
}
