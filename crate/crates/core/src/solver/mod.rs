//! Mild solutions: stochastic convolution, `Λ^{-α}` and the grid scheme.

pub mod convolution;
pub mod expo;
pub mod fractional;
pub mod mc;
pub mod scheme;

pub use convolution::{stochastic_convolution, ConstantIntegrand, FrozenIntegrand};
pub use fractional::lambda_frac_inverse;
pub use mc::{mc_map, simulate_mc, simulate_mc_partial, Ensemble, McOptions};
pub use scheme::{cell_average, grid_approx_path, grid_approx_path_with, Components, GridScheme, NoNoise, PreparedNoise, SchemePath};
