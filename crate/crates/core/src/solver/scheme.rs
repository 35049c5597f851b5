//! Grid approximation `u_n` with coefficients frozen at lagged cell averages.

use super::expo::{advance, phi1, phi2, segment_integral};
use crate::coefficients::{drift_apply, DiffusionSpec, DriftSpec};
use crate::error::{invalid, Error, Result};
use crate::noise::{
    FrozenState, JumpNoise, NoiseSpec, PreparedScalar, PreparedSpaceTime, PreparedSpectral,
};
use crate::prm::PointMeasure;
use crate::rng::{rng_from_seed, SimRng};
use crate::spectral::{PathRecord, SpectralField, SpectralOperator};

/// Configuration of one grid approximation.
#[derive(Clone, Debug, PartialEq)]
pub struct GridScheme {
    /// Grid level `n`; cells have width `2^{-n}`.
    pub level: u32,
    pub horizon: f64,
    pub initial: SpectralField,
    pub drift: DriftSpec,
    pub diffusion: DiffusionSpec,
    pub noise: NoiseSpec,
    /// Keep only the first modes of the initial condition.
    pub initial_cutoff: Option<usize>,
    /// Also record the free, drift and stochastic parts of `u_n`.
    pub record_components: bool,
}

impl GridScheme {
    pub fn new(initial: SpectralField, horizon: f64, level: u32) -> Self {
        Self {
            level,
            horizon,
            initial,
            drift: DriftSpec::zero(),
            diffusion: DiffusionSpec::Const { value: 1.0 },
            noise: NoiseSpec::None,
            initial_cutoff: None,
            record_components: false,
        }
    }

    pub fn at_level(&self, level: u32) -> Self {
        Self { level, ..self.clone() }
    }

    pub fn step(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn cells(&self) -> Result<usize> {
        let c = self.horizon / self.step();
        let r = c.round();
        if (c - r).abs() > 1e-9 * c.max(1.0) || r < 1.0 {
            return Err(invalid(
                "horizon",
                format!("{} is not a positive multiple of 2^-{}", self.horizon, self.level),
            ));
        }
        Ok(r as usize)
    }

    pub fn validate(&self, op: &SpectralOperator) -> Result<()> {
        if self.level > 24 {
            return Err(invalid("level", format!("{} exceeds 24", self.level)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid("horizon", format!("{} must be positive", self.horizon)));
        }
        self.cells()?;
        if self.initial.len() != op.modes() {
            return Err(Error::GridMismatch(format!(
                "initial condition has {} modes, operator {}",
                self.initial.len(),
                op.modes()
            )));
        }
        if self.initial.coeffs().iter().any(|c| !c.is_finite()) {
            return Err(invalid("initial", "non-finite coefficient"));
        }
        self.drift.validate()?;
        self.diffusion.validate()?;
        self.noise.validate()
    }

    /// `x_n`.
    pub fn regularized_initial(&self) -> SpectralField {
        let mut x = self.initial.clone();
        if let Some(m) = self.initial_cutoff {
            for c in x.coeffs_mut().iter_mut().skip(m) {
                *c = 0.0;
            }
        }
        x
    }
}

/// `u_n = e^{-tA}x_n + drift + stochastic`, each recorded on the times of `u_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Components {
    pub free: PathRecord,
    pub drift: PathRecord,
    pub stochastic: PathRecord,
}

impl Components {
    /// `u_n - drift`.
    pub fn remainder(&self) -> Result<PathRecord> {
        self.free.zip_with(&self.stochastic, |a, b| a + b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchemePath {
    pub level: u32,
    pub u: PathRecord,
    /// `û_n`, piecewise constant on cells and recorded on the times of `u`.
    pub u_hat: PathRecord,
    /// `û_n` on each cell.
    pub cell_values: Vec<SpectralField>,
    pub components: Option<Components>,
    pub atoms: usize,
}

impl SchemePath {
    pub fn step(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    /// `u_n(k 2^{-n})` for `k = 0..=cells`.
    pub fn grid_states(&self) -> Vec<SpectralField> {
        let h = self.step();
        (0..=self.cell_values.len())
            .map(|k| {
                let idx = self.u.index_of(k as f64 * h).expect("grid point recorded");
                self.u.states[idx].clone()
            })
            .collect()
    }

    pub fn grid_times(&self) -> Vec<f64> {
        let h = self.step();
        (0..=self.cell_values.len()).map(|k| k as f64 * h).collect()
    }
}

/// Noise with no atoms.
pub struct NoNoise;

impl JumpNoise for NoNoise {
    type Mark = f64;

    fn sample(&self, horizon: f64, _rng: &mut SimRng) -> Result<PointMeasure<f64>> {
        Ok(PointMeasure::empty(horizon))
    }
    fn jump(&self, frozen: &FrozenState<'_>, _mark: &f64) -> SpectralField {
        frozen.op.zero_field()
    }
    fn compensator_rate(&self, frozen: &FrozenState<'_>) -> SpectralField {
        frozen.op.zero_field()
    }
    fn rate(&self) -> f64 {
        0.0
    }
}

/// A [`NoiseSpec`] bound to an operator.
pub enum PreparedNoise {
    None(NoNoise),
    Scalar(PreparedScalar),
    Spectral(PreparedSpectral),
    SpaceTime(PreparedSpaceTime),
}

impl PreparedNoise {
    pub fn new(spec: &NoiseSpec, op: &SpectralOperator) -> Result<Self> {
        Ok(match spec {
            NoiseSpec::None => Self::None(NoNoise),
            NoiseSpec::Scalar(s) => Self::Scalar(PreparedScalar::new(s.clone())?),
            NoiseSpec::Spectral(s) => Self::Spectral(PreparedSpectral::new(s.clone(), op)?),
            NoiseSpec::SpaceTime(s) => Self::SpaceTime(PreparedSpaceTime::new(s.clone(), op)?),
        })
    }

    pub fn rate(&self) -> f64 {
        match self {
            Self::None(n) => n.rate(),
            Self::Scalar(n) => n.rate(),
            Self::Spectral(n) => n.rate(),
            Self::SpaceTime(n) => n.rate(),
        }
    }

    /// Samples the noise from `seed` and runs the scheme. Atoms depend only on
    /// the seed and horizon, so levels sharing a seed share the noise.
    pub fn run(
        &self,
        op: &SpectralOperator,
        scheme: &GridScheme,
        seed: u64,
        atom_budget: Option<usize>,
    ) -> Result<SchemePath> {
        fn go<N: JumpNoise>(
            n: &N,
            op: &SpectralOperator,
            s: &GridScheme,
            seed: u64,
            budget: Option<usize>,
        ) -> Result<SchemePath> {
            let pm = n.sample(s.horizon, &mut rng_from_seed(seed))?;
            if let Some(b) = budget {
                if pm.len() > b {
                    return Err(Error::AtomBudget { atoms: pm.len(), budget: b });
                }
            }
            grid_approx_path_with(op, s, n, &pm)
        }
        match self {
            Self::None(n) => go(n, op, scheme, seed, atom_budget),
            Self::Scalar(n) => go(n, op, scheme, seed, atom_budget),
            Self::Spectral(n) => go(n, op, scheme, seed, atom_budget),
            Self::SpaceTime(n) => go(n, op, scheme, seed, atom_budget),
        }
    }
}

/// Runs the scheme with the noise sampled from `seed`.
pub fn grid_approx_path(op: &SpectralOperator, scheme: &GridScheme, seed: u64) -> Result<SchemePath> {
    scheme.validate(op)?;
    PreparedNoise::new(&scheme.noise, op)?.run(op, scheme, seed, None)
}

struct Recorder {
    u: PathRecord,
    u_hat: PathRecord,
    parts: Option<[PathRecord; 3]>,
}

/// Runs the scheme against given atoms. Each cell freezes `F` and `G` at `û`,
/// advances exactly between atoms and accumulates the cell integral of `u` in
/// closed form, which becomes `û` on the next cell.
pub fn grid_approx_path_with<N: JumpNoise>(
    op: &SpectralOperator,
    scheme: &GridScheme,
    noise: &N,
    pm: &PointMeasure<N::Mark>,
) -> Result<SchemePath> {
    scheme.validate(op)?;
    if pm.horizon < scheme.horizon {
        return Err(Error::AtomOutsideWindow {
            t: scheme.horizon,
            horizon: pm.horizon,
        });
    }
    let h = scheme.step();
    let cells = scheme.cells()?;
    let rho = op.eigenvalues();
    let modes = op.modes();
    let x = scheme.regularized_initial();

    let mut u = x.clone();
    let mut u_hat = x.clone();
    let mut drift_part = vec![0.0; modes];
    let mut stoch_part = vec![0.0; modes];
    let free_at = |t: f64| -> SpectralField {
        SpectralField::new(x.coeffs().iter().zip(rho).map(|(c, r)| (-r * t).exp() * c).collect())
    };

    let mut rec = Recorder {
        u: PathRecord::new(),
        u_hat: PathRecord::new(),
        parts: scheme.record_components.then(|| [PathRecord::new(), PathRecord::new(), PathRecord::new()]),
    };
    rec.u.push(0.0, u.clone())?;
    rec.u_hat.push(0.0, u_hat.clone())?;
    if let Some(p) = rec.parts.as_mut() {
        p[0].push(0.0, x.clone())?;
        p[1].push(0.0, op.zero_field())?;
        p[2].push(0.0, op.zero_field())?;
    }

    let mut cell_values = Vec::with_capacity(cells);
    let mut atoms = 0usize;
    for k in 0..cells {
        let a = k as f64 * h;
        let b = (k + 1) as f64 * h;
        let frozen = FrozenState::new(op, &u_hat, &scheme.diffusion);
        let f = drift_apply(op, &scheme.drift, &u_hat);
        let c = noise.compensator_rate(&frozen);
        let forcing: Vec<f64> = f.coeffs().iter().zip(c.coeffs()).map(|(f, c)| f - c).collect();
        let mut integral = vec![0.0; modes];
        let mut t = a;

        let mut advance_to = |t1: f64, t0: f64, u: &mut SpectralField, dp: &mut [f64], sp: &mut [f64]| {
            let tau = t1 - t0;
            for i in 0..modes {
                let r = rho[i];
                let ui = &mut u.coeffs_mut()[i];
                integral[i] += segment_integral(r, tau, *ui, forcing[i]);
                *ui = advance(r, tau, *ui, forcing[i]);
                dp[i] = advance(r, tau, dp[i], f.coeffs()[i]);
                sp[i] = advance(r, tau, sp[i], -c.coeffs()[i]);
            }
        };

        for atom in pm.window(a, b) {
            advance_to(atom.t, t, &mut u, &mut drift_part, &mut stoch_part);
            let jump = noise.jump(&frozen, &atom.mark);
            let left = u.clone();
            u += &jump;
            rec.u.push_jump(atom.t, left, u.clone())?;
            rec.u_hat.push(atom.t, u_hat.clone())?;
            if let Some(p) = rec.parts.as_mut() {
                let s_left = SpectralField::new(stoch_part.clone());
                for (s, j) in stoch_part.iter_mut().zip(jump.coeffs()) {
                    *s += j;
                }
                p[0].push(atom.t, free_at(atom.t))?;
                p[1].push(atom.t, SpectralField::new(drift_part.clone()))?;
                p[2].push_jump(atom.t, s_left, SpectralField::new(stoch_part.clone()))?;
            } else {
                for (s, j) in stoch_part.iter_mut().zip(jump.coeffs()) {
                    *s += j;
                }
            }
            atoms += 1;
            t = atom.t;
        }
        if b > t {
            advance_to(b, t, &mut u, &mut drift_part, &mut stoch_part);
            rec.u.push(b, u.clone())?;
            rec.u_hat.push(b, u_hat.clone())?;
            if let Some(p) = rec.parts.as_mut() {
                p[0].push(b, free_at(b))?;
                p[1].push(b, SpectralField::new(drift_part.clone()))?;
                p[2].push(b, SpectralField::new(stoch_part.clone()))?;
            }
        }
        let next = SpectralField::new(integral.into_iter().map(|v| v / h).collect());
        cell_values.push(std::mem::replace(&mut u_hat, next));
        if k + 1 < cells && u_hat != cell_values[k] {
            rec.u_hat.push_jump(b, cell_values[k].clone(), u_hat.clone())?;
        }
    }

    Ok(SchemePath {
        level: scheme.level,
        u: rec.u,
        u_hat: rec.u_hat,
        cell_values,
        components: rec.parts.map(|[free, drift, stochastic]| Components {
            free,
            drift,
            stochastic,
        }),
        atoms,
    })
}

/// `h^{-1} ∫_{(k-1)h}^{kh} u(s) ds` for a path that solves `u' = -ρu + b` with
/// constant `b` between recorded times; `k = 0` returns `u(0)`.
pub fn cell_average(op: &SpectralOperator, path: &PathRecord, level: u32, k: usize) -> Result<SpectralField> {
    if path.is_empty() {
        return Err(invalid("path", "empty"));
    }
    if k == 0 {
        return Ok(path.states[0].clone());
    }
    let h = (-(level as f64)).exp2();
    let (a, b) = ((k - 1) as f64 * h, k as f64 * h);
    let (ia, ib) = match (path.index_of(a), path.index_of(b)) {
        (Some(ia), Some(ib)) => (ia, ib),
        _ => return Err(Error::GridMismatch(format!("cell [{a}, {b}] is not covered by the path"))),
    };
    let modes = path.modes().min(op.modes());
    let mut acc = vec![0.0; modes];
    for j in ia..ib {
        let tau = path.times[j + 1] - path.times[j];
        let start = &path.states[j];
        let end = path.left_limit(j + 1);
        for (i, slot) in acc.iter_mut().enumerate() {
            let r = op.rho(i);
            let p1 = phi1(r, tau);
            let s = start.coeffs()[i];
            let forcing = (end.coeffs()[i] - (-r * tau).exp() * s) / p1;
            *slot += p1 * s + phi2(r, tau) * forcing;
        }
    }
    Ok(SpectralField::new(acc.into_iter().map(|v| v / h).collect()))
}
