//! Run configuration: parsing, defaults and resolution.

use serde::{Deserialize, Serialize};

use levyrd_core::gate::{check_claim_spectral, check_ex01, check_main, check_stpn};
use levyrd_core::noise::ScalarNoiseSpec;
use levyrd_core::prm::PointMass;
use levyrd_core::spectral::EigenvalueLaw;
use levyrd_core::{
    DiffusionSpec, DriftSpec, GridScheme, HypothesisReport, LevyMeasure, NoiseSpec, NormKind, SpaceTimeNoiseSpec,
    SpectralField, SpectralNoiseSpec, SpectralOperator,
};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub operator: OperatorConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default = "default_drift")]
    pub drift: DriftSpec,
    #[serde(default = "default_diffusion")]
    pub diffusion: DiffusionSpec,
    #[serde(default)]
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateConfig>,
}

fn default_drift() -> DriftSpec {
    DriftSpec::zero()
}

fn default_diffusion() -> DiffusionSpec {
    DiffusionSpec::Const { value: 1.0 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorConfig {
    pub modes: usize,
    pub law: EigenvalueLaw,
    /// Required for the tabulated law.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<f64>>,
    #[serde(default)]
    pub shift: f64,
    /// Interior grid nodes; `4 * modes - 1` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self {
            modes: 16,
            law: EigenvalueLaw::DirichletLaplacian,
            eigenvalues: None,
            shift: 0.0,
            grid_points: None,
        }
    }
}

/// Jump measure as written in a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureConfig {
    Null,
    Atoms {
        atoms: Vec<PointMass>,
    },
    SymmetricPair {
        z: f64,
        mass: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
        height: f64,
    },
    /// Small-jump cutoff defaults to discarding `1e-6` of the `p`-th moment.
    Tempered {
        c_pos: f64,
        c_neg: f64,
        index: f64,
        decay_pos: f64,
        decay_neg: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<f64>,
        #[serde(default = "two")]
        p: f64,
    },
}

fn two() -> f64 {
    2.0
}

impl MeasureConfig {
    pub fn build(&self) -> Result<LevyMeasure, CliError> {
        let nu = match self {
            MeasureConfig::Null => LevyMeasure::null(),
            MeasureConfig::Atoms { atoms } => LevyMeasure::atomic(atoms.clone())?,
            MeasureConfig::SymmetricPair { z, mass } => LevyMeasure::symmetric_pair(*z, *mass)?,
            MeasureConfig::Uniform { lo, hi, height } => LevyMeasure::uniform(*lo, *hi, *height)?,
            MeasureConfig::Tempered {
                c_pos,
                c_neg,
                index,
                decay_pos,
                decay_neg,
                epsilon,
                p,
            } => match epsilon {
                Some(e) => LevyMeasure::tempered(*c_pos, *c_neg, *index, *decay_pos, *decay_neg, *e)?,
                None => LevyMeasure::tempered_with_default_cutoff(*c_pos, *c_neg, *index, *decay_pos, *decay_neg, *p)?,
            },
        };
        Ok(nu)
    }

    fn resolve(&mut self) -> Result<(), CliError> {
        let nu = self.build()?;
        if let MeasureConfig::Tempered { epsilon, .. } = self {
            *epsilon = Some(nu.truncation_epsilon());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseConfig {
    #[default]
    None,
    Scalar {
        measure: MeasureConfig,
    },
    Spectral {
        decay: f64,
        /// Defaults to the operator's mode count.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modes: Option<usize>,
        base: MeasureConfig,
    },
    SpaceTime {
        #[serde(default = "unit_domain")]
        domain: [f64; 2],
        measure: MeasureConfig,
    },
}

fn unit_domain() -> [f64; 2] {
    [0.0, 1.0]
}

impl NoiseConfig {
    pub fn build(&self, operator_modes: usize) -> Result<NoiseSpec, CliError> {
        Ok(match self {
            NoiseConfig::None => NoiseSpec::None,
            NoiseConfig::Scalar { measure } => NoiseSpec::Scalar(ScalarNoiseSpec {
                measure: measure.build()?,
            }),
            NoiseConfig::Spectral { decay, modes, base } => NoiseSpec::Spectral(SpectralNoiseSpec {
                decay: *decay,
                modes: modes.unwrap_or(operator_modes),
                base: base.build()?,
            }),
            NoiseConfig::SpaceTime { domain, measure } => NoiseSpec::SpaceTime(SpaceTimeNoiseSpec {
                domain: *domain,
                measure: measure.build()?,
            }),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialConfig {
    Zero,
    /// `amplitude · e_index`, 1-based.
    Mode { index: usize, amplitude: f64 },
    Coefficients { values: Vec<f64> },
    /// Projection of the constant function.
    Constant { value: f64 },
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig::Mode {
            index: 1,
            amplitude: 1.0,
        }
    }
}

impl InitialConfig {
    pub fn build(&self, op: &SpectralOperator) -> Result<SpectralField, CliError> {
        let n = op.modes();
        match self {
            InitialConfig::Zero => Ok(op.zero_field()),
            InitialConfig::Mode { index, amplitude } => {
                if *index == 0 || *index > n {
                    return Err(CliError::Config(format!("scheme.initial.index: {index} is outside 1..={n}")));
                }
                Ok(op.unit(index - 1).scale(*amplitude))
            }
            InitialConfig::Coefficients { values } => {
                if values.len() != n {
                    return Err(CliError::Config(format!(
                        "scheme.initial.values: expected {n} coefficients, got {}",
                        values.len()
                    )));
                }
                Ok(SpectralField::new(values.clone()))
            }
            InitialConfig::Constant { value } => Ok(op.project_constant(*value)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeConfig {
    pub level: u32,
    /// Levels used by `ladder`.
    pub levels: Vec<u32>,
    pub horizon: f64,
    /// Exponential weight; `1 + β + max(0, -k)` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub initial: InitialConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_cutoff: Option<usize>,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            level: 6,
            levels: vec![4, 5, 6, 7, 8],
            horizon: 1.0,
            lambda: None,
            initial: InitialConfig::default(),
            initial_cutoff: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub replicas: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom_budget: Option<usize>,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            replicas: 100,
            seed: 0,
            atom_budget: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Moment exponent `p`.
    pub p: f64,
    /// Interpolation index of the `E` norm.
    pub delta: f64,
    pub apriori_norm: NormKind,
    pub apriori_tolerance: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            delta: 0.25,
            apriori_norm: NormKind::Sup,
            apriori_tolerance: 0.05,
        }
    }
}

impl DiagnosticsConfig {
    pub fn b_norm(&self) -> NormKind {
        NormKind::B { p: self.p }
    }

    pub fn e_norm(&self) -> NormKind {
        NormKind::E {
            delta: self.delta,
            p: self.p,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputsConfig {
    pub directory: String,
    pub formats: Vec<Format>,
    /// Number of replica paths written as CSV.
    pub paths: usize,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        Self {
            directory: "out".into(),
            formats: vec![Format::Csv, Format::Json],
            paths: 0,
        }
    }
}

impl OutputsConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

/// Parameter tuple for one of the existence results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GateConfig {
    Main {
        delta: f64,
        delta_f: f64,
        delta_g: f64,
        delta_i: f64,
        p: f64,
    },
    SpectralNoise {
        d: f64,
        p: f64,
        q: f64,
        r: f64,
        alpha: f64,
        delta: f64,
    },
    SpaceTimeNoise {
        d: f64,
        k: u32,
        p: f64,
        q: f64,
        gamma: f64,
    },
    SpectralMoment {
        alpha: f64,
        gamma: f64,
        d: f64,
        p: f64,
        r: f64,
    },
}

impl GateConfig {
    pub fn evaluate(&self) -> HypothesisReport {
        match *self {
            GateConfig::Main {
                delta,
                delta_f,
                delta_g,
                delta_i,
                p,
            } => check_main(delta, delta_f, delta_g, delta_i, p),
            GateConfig::SpectralNoise { d, p, q, r, alpha, delta } => check_ex01(d, p, q, r, alpha, delta),
            GateConfig::SpaceTimeNoise { d, k, p, q, gamma } => check_stpn(d, k, p, q, gamma),
            GateConfig::SpectralMoment { alpha, gamma, d, p, r } => check_claim_spectral(alpha, gamma, d, p, r),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Fills every derived default and validates the result.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let n = self.operator.modes;
        if n == 0 {
            return Err(CliError::Config("operator.modes: must be at least 1".into()));
        }
        self.operator.grid_points.get_or_insert(4 * n - 1);
        if self.scheme.lambda.is_none() {
            self.scheme.lambda = Some(1.0 + self.drift.beta + (-self.drift.k).max(0.0));
        }
        match &mut self.noise {
            NoiseConfig::None => {}
            NoiseConfig::Scalar { measure } | NoiseConfig::SpaceTime { measure, .. } => measure.resolve()?,
            NoiseConfig::Spectral { modes, base, .. } => {
                modes.get_or_insert(n);
                base.resolve()?;
            }
        }
        if self.mc.replicas == 0 {
            return Err(CliError::Config("mc.replicas: must be at least 1".into()));
        }
        self.drift.validate()?;
        self.diffusion.validate()?;
        self.diagnostics.e_norm().validate()?;
        self.diagnostics.apriori_norm.validate()?;
        let op = self.operator()?;
        self.scheme(&op)?.validate(&op)?;
        Ok(self)
    }

    pub fn lambda(&self) -> f64 {
        self.scheme
            .lambda
            .unwrap_or(1.0 + self.drift.beta + (-self.drift.k).max(0.0))
    }

    pub fn operator(&self) -> Result<SpectralOperator, CliError> {
        let o = &self.operator;
        let op = match o.law {
            EigenvalueLaw::DirichletLaplacian => {
                if o.eigenvalues.is_some() {
                    return Err(CliError::Config(
                        "operator.eigenvalues: only allowed with law = \"tabulated\"".into(),
                    ));
                }
                SpectralOperator::with_grid(o.modes, o.grid_points.unwrap_or(4 * o.modes - 1))?
            }
            EigenvalueLaw::Tabulated => {
                let ev = o
                    .eigenvalues
                    .clone()
                    .ok_or_else(|| CliError::Config("operator.eigenvalues: required for law = \"tabulated\"".into()))?;
                if ev.len() != o.modes {
                    return Err(CliError::Config(format!(
                        "operator.eigenvalues: expected {} values, got {}",
                        o.modes,
                        ev.len()
                    )));
                }
                SpectralOperator::from_eigenvalues(ev, o.grid_points)?
            }
        };
        Ok(if o.shift != 0.0 { op.with_shift(o.shift)? } else { op })
    }

    pub fn scheme(&self, op: &SpectralOperator) -> Result<GridScheme, CliError> {
        let mut s = GridScheme::new(self.scheme.initial.build(op)?, self.scheme.horizon, self.scheme.level);
        s.drift = self.drift.clone();
        s.diffusion = self.diffusion.clone();
        s.noise = self.noise.build(op.modes())?;
        s.initial_cutoff = self.scheme.initial_cutoff;
        Ok(s)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }
}
