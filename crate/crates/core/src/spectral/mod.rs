//! Spectral realisation of the dissipative operator, its semigroup and the
//! norms in which the estimates are stated.

pub mod besov;
pub mod field;
pub mod norms;
pub mod operator;

pub use besov::BesovFilterBank;
pub use field::{PathRecord, SpectralField};
pub use norms::{
    frac_power_apply, interp_norm, lp_lambda_integral, lp_lambda_norm, semigroup_apply, w_alpha_p_norm, GagliardoNorm,
    NormKind,
};
pub use operator::{EigenvalueLaw, OperatorDescriptor, SpectralOperator};
