//! Simulation and verification of reaction–diffusion equations driven by
//! Poisson random measures.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coefficients;
pub mod diagnostics;
pub mod error;
pub mod gate;
pub mod noise;
pub mod prm;
pub(crate) mod quad;
pub mod rng;
pub mod solver;
pub mod spectral;

pub use diagnostics::EstimateReport;
pub use coefficients::{DiffusionSpec, DriftKind, DriftSpec};
pub use error::{Error, Result};
pub use gate::HypothesisReport;
pub use noise::{ModeMark, NoiseSpec, SiteMark, SpaceTimeNoiseSpec, SpectralNoiseSpec};
pub use prm::{LevyMeasure, PointMeasure};
pub use solver::{Ensemble, GridScheme, McOptions, SchemePath};
pub use spectral::{NormKind, PathRecord, SpectralField, SpectralOperator};
