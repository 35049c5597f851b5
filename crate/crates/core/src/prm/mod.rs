//! Poisson random measures, their intensities and compensated integrals.

pub mod integral;
pub mod measure;
pub mod point;

pub use integral::{atom_sum, compensated_integral, compensator_term, levy_path_from_prm, ScalarPath};
pub use measure::{CompensatorSpec, LevyMeasure, PointMass};
pub use point::{sample_marked, sample_prm, sample_prm_with, Atom, MarkRecord, PointMeasure, PointMeasureHeader};
