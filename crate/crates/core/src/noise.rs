//! Concrete jump noises: a scalar Lévy process acting multiplicatively, the
//! spectral Lévy noise `Σ_i λ_i e_i L_i` and space–time Poissonian white noise.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coefficients::DiffusionSpec;
use crate::error::{invalid, Error, Result};
use crate::prm::point::{format_f64, parse_f64};
use crate::prm::{sample_marked, LevyMeasure, MarkRecord, PointMeasure};
use crate::rng::{rng_from_seed, SimRng};
use crate::spectral::{BesovFilterBank, SpectralField, SpectralOperator};

/// Mark `(i, z)` of the spectral noise; `mode` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeMark {
    pub mode: usize,
    pub z: f64,
}

/// Mark `(ξ, ζ)` of space–time noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiteMark {
    pub xi: f64,
    pub zeta: f64,
}

impl MarkRecord for ModeMark {
    const COLUMNS: &'static [&'static str] = &["i", "z"];
    fn to_fields(&self) -> Vec<String> {
        vec![self.mode.to_string(), format_f64(self.z)]
    }
    fn from_fields(fields: &[&str]) -> Result<Self> {
        let mode = fields[0]
            .trim()
            .parse()
            .map_err(|e| Error::Format(format!("column i: {e}")))?;
        Ok(Self {
            mode,
            z: parse_f64(fields[1], "z")?,
        })
    }
}

impl MarkRecord for SiteMark {
    const COLUMNS: &'static [&'static str] = &["xi", "zeta"];
    fn to_fields(&self) -> Vec<String> {
        vec![format_f64(self.xi), format_f64(self.zeta)]
    }
    fn from_fields(fields: &[&str]) -> Result<Self> {
        Ok(Self {
            xi: parse_f64(fields[0], "xi")?,
            zeta: parse_f64(fields[1], "zeta")?,
        })
    }
}

/// State on which the noise coefficient is frozen for one cell.
pub struct FrozenState<'a> {
    pub op: &'a SpectralOperator,
    pub state: &'a SpectralField,
    /// `g(û(ξ_j))` on the operator grid.
    pub g_grid: Vec<f64>,
    pub diffusion: &'a DiffusionSpec,
}

impl<'a> FrozenState<'a> {
    pub fn new(op: &'a SpectralOperator, state: &'a SpectralField, diffusion: &'a DiffusionSpec) -> Self {
        let g_grid = crate::coefficients::diffusion_apply(op, diffusion, state);
        Self {
            op,
            state,
            g_grid,
            diffusion,
        }
    }

    /// `û(ξ)` at an arbitrary point.
    pub fn value_at(&self, xi: f64) -> f64 {
        self.state
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c * self.op.eval_at(i, xi))
            .sum()
    }
}

/// A Poisson-driven noise together with its coefficient `G(û; mark)`.
pub trait JumpNoise: Sync {
    type Mark: Clone + Send + Sync + std::fmt::Debug;

    fn sample(&self, horizon: f64, rng: &mut SimRng) -> Result<PointMeasure<Self::Mark>>;

    /// Coefficient vector of `G(û; mark)`.
    fn jump(&self, frozen: &FrozenState<'_>, mark: &Self::Mark) -> SpectralField;

    /// `∫ G(û; m) μ(dm)`, the compensator rate per unit time.
    fn compensator_rate(&self, frozen: &FrozenState<'_>) -> SpectralField;

    /// Total intensity per unit time.
    fn rate(&self) -> f64;
}

/// Scalar Lévy noise acting as `G(u; z) = z g(u(·))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarNoiseSpec {
    pub measure: LevyMeasure,
}

/// Spectral Lévy noise `Σ_{i ≤ N} i^{-decay} e_i L_i` with i.i.d. scalar `L_i` of Lévy measure `base`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralNoiseSpec {
    pub decay: f64,
    pub modes: usize,
    pub base: LevyMeasure,
}

/// Space–time Poissonian white noise on `domain × ℝ`, intensity `dξ ⊗ ν ⊗ dt`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceTimeNoiseSpec {
    #[serde(default = "unit_domain")]
    pub domain: [f64; 2],
    pub measure: LevyMeasure,
}

fn unit_domain() -> [f64; 2] {
    [0.0, 1.0]
}

impl SpectralNoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.decay > 0.0 && self.decay.is_finite()) {
            return Err(invalid("decay", format!("{} must be positive", self.decay)));
        }
        if self.modes == 0 {
            return Err(invalid("modes", "at least one mode is required"));
        }
        self.base.validate()
    }

    /// `λ_i = i^{-decay}` for 1-based `i`.
    pub fn weight(&self, i: usize) -> f64 {
        (i as f64).powf(-self.decay)
    }

    /// `Σ_{i > N} λ_i^p · C_ν`, the p-moment discarded by the mode truncation.
    pub fn discarded_tail(&self, p: f64) -> Result<f64> {
        Ok(zeta_tail(self.decay * p, self.modes) * self.base.abs_moment(p)?)
    }
}

/// Samples the spectral noise: total rate `N m`, mode uniform on `1..=N`.
pub fn sample_spectral_noise(spec: &SpectralNoiseSpec, horizon: f64, seed: u64) -> Result<PointMeasure<ModeMark>> {
    let mut rng = rng_from_seed(seed);
    let mut pm = sample_spectral_noise_with(spec, horizon, &mut rng)?;
    pm.seed = Some(seed);
    Ok(pm)
}

pub fn sample_spectral_noise_with(
    spec: &SpectralNoiseSpec,
    horizon: f64,
    rng: &mut SimRng,
) -> Result<PointMeasure<ModeMark>> {
    spec.validate()?;
    let n = spec.modes;
    let rate = n as f64 * spec.base.total_mass();
    sample_marked(rate, horizon, rng, |r| {
        // A single mode consumes no randomness, so N = 1 reproduces the scalar sampler.
        let mode = if n == 1 { 1 } else { r.random_range(1..=n) };
        ModeMark {
            mode,
            z: spec.base.sample_mark(r),
        }
    })
}

/// Coefficients of `g(u(·)) λ_i e_i z`.
pub fn spectral_g_increment(
    op: &SpectralOperator,
    u: &SpectralField,
    mark: ModeMark,
    spec: &SpectralNoiseSpec,
    g: &DiffusionSpec,
) -> SpectralField {
    let frozen = FrozenState::new(op, u, g);
    PreparedSpectral::new(spec.clone(), op).map_or_else(|_| op.zero_field(), |p| p.jump(&frozen, &mark))
}

impl SpaceTimeNoiseSpec {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.domain;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(invalid("domain", format!("[{lo}, {hi}] must be a subinterval of [0, 1]")));
        }
        self.measure.validate()
    }

    pub fn domain_length(&self) -> f64 {
        self.domain[1] - self.domain[0]
    }
}

/// Samples space–time noise: rate `|𝒪| m`, `ξ` uniform in the open domain, `ζ ~ ν/m`.
pub fn sample_spacetime_noise(spec: &SpaceTimeNoiseSpec, horizon: f64, seed: u64) -> Result<PointMeasure<SiteMark>> {
    let mut rng = rng_from_seed(seed);
    let mut pm = sample_spacetime_noise_with(spec, horizon, &mut rng)?;
    pm.seed = Some(seed);
    Ok(pm)
}

pub fn sample_spacetime_noise_with(
    spec: &SpaceTimeNoiseSpec,
    horizon: f64,
    rng: &mut SimRng,
) -> Result<PointMeasure<SiteMark>> {
    spec.validate()?;
    let [lo, hi] = spec.domain;
    let rate = spec.domain_length() * spec.measure.total_mass();
    sample_marked(rate, horizon, rng, |r| {
        let xi = loop {
            let x = lo + (hi - lo) * r.random::<f64>();
            if x > lo && x < hi {
                break x;
            }
        };
        SiteMark {
            xi,
            zeta: spec.measure.sample_mark(r),
        }
    })
}

/// Galerkin projection of `g(u(ξ)) ζ δ_ξ`: coefficient `i` is `g(u(ξ)) ζ e_i(ξ)`.
pub fn lift_to_besov(op: &SpectralOperator, mark: SiteMark, g: &DiffusionSpec, u: &SpectralField) -> Result<SpectralField> {
    if !(mark.xi > 0.0 && mark.xi < 1.0) {
        return Err(Error::BoundaryPoint(mark.xi));
    }
    let frozen = FrozenState::new(op, u, g);
    Ok(site_jump(&frozen, mark))
}

fn site_jump(frozen: &FrozenState<'_>, mark: SiteMark) -> SpectralField {
    let amp = frozen.diffusion.g(frozen.value_at(mark.xi)) * mark.zeta;
    let op = frozen.op;
    if amp == 0.0 {
        return op.zero_field();
    }
    SpectralField::new((0..op.modes()).map(|i| amp * op.eval_at(i, mark.xi)).collect())
}

/// Besov proxy `|g(u(ξ)) ζ δ_ξ|_{B^{1/p-1}_{p,∞}}` with `ξ` snapped to the nearest grid node.
pub fn lifted_besov_norm(
    bank: &BesovFilterBank,
    op: &SpectralOperator,
    mark: SiteMark,
    g: &DiffusionSpec,
    u: &SpectralField,
) -> Result<f64> {
    if !(mark.xi > 0.0 && mark.xi < 1.0) {
        return Err(Error::BoundaryPoint(mark.xi));
    }
    let grid = op.grid();
    let j = grid.partition_point(|&x| x < mark.xi).min(grid.len() - 1);
    let node = if j > 0 && (mark.xi - grid[j - 1]) < (grid[j] - mark.xi) {
        grid[j - 1]
    } else {
        grid[j]
    };
    let frozen = FrozenState::new(op, u, g);
    let amp = g.g(frozen.value_at(node)) * mark.zeta;
    Ok(bank.besov_dirac_norm_direct(amp, node))
}

/// Noise of a run, as given in configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseSpec {
    None,
    Scalar(ScalarNoiseSpec),
    Spectral(SpectralNoiseSpec),
    SpaceTime(SpaceTimeNoiseSpec),
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseSpec::None => Ok(()),
            NoiseSpec::Scalar(s) => s.measure.validate(),
            NoiseSpec::Spectral(s) => s.validate(),
            NoiseSpec::SpaceTime(s) => s.validate(),
        }
    }
}

/// [`ScalarNoiseSpec`] with its mean jump precomputed.
pub struct PreparedScalar {
    pub spec: ScalarNoiseSpec,
    mean_jump: f64,
    mass: f64,
}

impl PreparedScalar {
    pub fn new(spec: ScalarNoiseSpec) -> Result<Self> {
        spec.measure.validate()?;
        Ok(Self {
            mean_jump: spec.measure.mean_jump()?,
            mass: spec.measure.total_mass(),
            spec,
        })
    }
}

impl JumpNoise for PreparedScalar {
    type Mark = f64;

    fn sample(&self, horizon: f64, rng: &mut SimRng) -> Result<PointMeasure<f64>> {
        sample_marked(self.mass, horizon, rng, |r| self.spec.measure.sample_mark(r))
    }

    fn jump(&self, frozen: &FrozenState<'_>, z: &f64) -> SpectralField {
        frozen.op.project(&frozen.g_grid).scale(*z)
    }

    fn compensator_rate(&self, frozen: &FrozenState<'_>) -> SpectralField {
        if self.mean_jump == 0.0 {
            return frozen.op.zero_field();
        }
        frozen.op.project(&frozen.g_grid).scale(self.mean_jump)
    }

    fn rate(&self) -> f64 {
        self.mass
    }
}

/// [`SpectralNoiseSpec`] bound to an operator.
pub struct PreparedSpectral {
    pub spec: SpectralNoiseSpec,
    mean_jump: f64,
    mass: f64,
    /// `Σ_i λ_i e_i(ξ_j)`.
    weighted_sum: Vec<f64>,
}

impl PreparedSpectral {
    pub fn new(spec: SpectralNoiseSpec, op: &SpectralOperator) -> Result<Self> {
        spec.validate()?;
        if spec.modes > op.modes() {
            return Err(Error::GridMismatch(format!(
                "noise uses {} modes but the operator has {}",
                spec.modes,
                op.modes()
            )));
        }
        let mut weighted_sum = vec![0.0; op.grid_len()];
        for i in 0..spec.modes {
            let w = spec.weight(i + 1);
            for (s, e) in weighted_sum.iter_mut().zip(op.basis_row(i)) {
                *s += w * e;
            }
        }
        Ok(Self {
            mean_jump: spec.base.mean_jump()?,
            mass: spec.base.total_mass(),
            spec,
            weighted_sum,
        })
    }
}

impl JumpNoise for PreparedSpectral {
    type Mark = ModeMark;

    fn sample(&self, horizon: f64, rng: &mut SimRng) -> Result<PointMeasure<ModeMark>> {
        sample_spectral_noise_with(&self.spec, horizon, rng)
    }

    fn jump(&self, frozen: &FrozenState<'_>, mark: &ModeMark) -> SpectralField {
        let op = frozen.op;
        let scale = self.spec.weight(mark.mode) * mark.z;
        if let Some(c) = frozen.diffusion.is_constant() {
            // g constant: the increment is exactly c λ_i z e_i.
            let mut out = op.zero_field();
            out.coeffs_mut()[mark.mode - 1] = c * scale;
            return out;
        }
        let row = op.basis_row(mark.mode - 1);
        let vals: Vec<f64> = frozen.g_grid.iter().zip(row).map(|(g, e)| g * e * scale).collect();
        op.project(&vals)
    }

    fn compensator_rate(&self, frozen: &FrozenState<'_>) -> SpectralField {
        if self.mean_jump == 0.0 {
            return frozen.op.zero_field();
        }
        let vals: Vec<f64> = frozen
            .g_grid
            .iter()
            .zip(&self.weighted_sum)
            .map(|(g, w)| g * w * self.mean_jump)
            .collect();
        frozen.op.project(&vals)
    }

    fn rate(&self) -> f64 {
        self.spec.modes as f64 * self.mass
    }
}

/// [`SpaceTimeNoiseSpec`] with its domain indicator on the grid.
pub struct PreparedSpaceTime {
    pub spec: SpaceTimeNoiseSpec,
    mean_jump: f64,
    mass: f64,
    indicator: Vec<f64>,
}

impl PreparedSpaceTime {
    pub fn new(spec: SpaceTimeNoiseSpec, op: &SpectralOperator) -> Result<Self> {
        spec.validate()?;
        let [lo, hi] = spec.domain;
        let indicator = op.grid().iter().map(|&x| if x > lo && x < hi { 1.0 } else { 0.0 }).collect();
        Ok(Self {
            mean_jump: spec.measure.mean_jump()?,
            mass: spec.measure.total_mass(),
            spec,
            indicator,
        })
    }
}

impl JumpNoise for PreparedSpaceTime {
    type Mark = SiteMark;

    fn sample(&self, horizon: f64, rng: &mut SimRng) -> Result<PointMeasure<SiteMark>> {
        sample_spacetime_noise_with(&self.spec, horizon, rng)
    }

    fn jump(&self, frozen: &FrozenState<'_>, mark: &SiteMark) -> SpectralField {
        site_jump(frozen, *mark)
    }

    fn compensator_rate(&self, frozen: &FrozenState<'_>) -> SpectralField {
        if self.mean_jump == 0.0 {
            return frozen.op.zero_field();
        }
        let vals: Vec<f64> = frozen
            .g_grid
            .iter()
            .zip(&self.indicator)
            .map(|(g, w)| g * w * self.mean_jump)
            .collect();
        frozen.op.project(&vals)
    }

    fn rate(&self) -> f64 {
        self.spec.domain_length() * self.mass
    }
}

/// Claim-type moment sum `Σ_i λ_i i^{p(γ/d + 1/2 - 1/r)}` with `λ_i = i^{-α}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSum {
    /// Exponent `e` of the summand `i^e`.
    pub exponent: f64,
    /// Partial sum up to `N`, if `N` was given.
    pub partial: Option<f64>,
    /// `Σ_{i > N} i^e` (with `N = 0` when unspecified); infinite when divergent.
    pub tail: f64,
    pub convergent: bool,
}

/// Evaluates the sum and its convergence verdict `α > 1 + p(γ/d + 1/2 - 1/r)`.
pub fn spectral_moment_sum(alpha: f64, gamma: f64, p: f64, r: f64, d: f64, n: Option<usize>) -> MomentSum {
    let growth = p * (gamma / d + 0.5 - 1.0 / r);
    let exponent = -alpha + growth;
    let convergent = exponent < -1.0 - crate::gate::SLACK_TOL;
    let partial = n.map(|n| {
        (1..=n)
            .map(|i| {
                let x = i as f64;
                x.powf(-alpha) * x.powf(growth)
            })
            .sum()
    });
    let tail = if convergent {
        zeta_tail(-exponent, n.unwrap_or(0))
    } else {
        f64::INFINITY
    };
    MomentSum {
        exponent,
        partial,
        tail,
        convergent,
    }
}

/// Verdict from the growth of block sums: with `B(N) = S(2N) - S(N)` the ratio
/// `B(2N)/B(N)` tends to `2^{e+1}`, which is below one exactly in the convergent case.
pub fn classify_partial_sums(alpha: f64, gamma: f64, p: f64, r: f64, d: f64, n: usize) -> bool {
    let growth = p * (gamma / d + 0.5 - 1.0 / r);
    let term = |i: usize| {
        let x = i as f64;
        x.powf(-alpha) * x.powf(growth)
    };
    let block = |a: usize, b: usize| -> f64 { (a + 1..=b).map(term).sum() };
    let b1 = block(n, 2 * n);
    let b2 = block(2 * n, 4 * n);
    b2 < b1
}

/// `Σ_{i > n} i^{-s}`, infinite for `s ≤ 1`. Direct summation over 64 terms,
/// then Euler–Maclaurin for the remainder.
pub fn zeta_tail(s: f64, n: usize) -> f64 {
    if s <= 1.0 {
        return f64::INFINITY;
    }
    let direct = 64;
    let mut acc = 0.0;
    for i in n + 1..=n + direct {
        acc += (i as f64).powf(-s);
    }
    let a = (n + direct) as f64;
    // Σ_{i > a} i^{-s} = ∫_a^∞ x^{-s} dx - a^{-s}/2 - B_2/2! f'(a) - B_4/4! f'''(a) + …
    let f = a.powf(-s);
    let integral = a.powf(1.0 - s) / (s - 1.0);
    let d1 = -s * f / a;
    let d3 = -s * (s + 1.0) * (s + 2.0) * f / (a * a * a);
    acc + integral - 0.5 * f - d1 / 12.0 + d3 / 720.0
}
