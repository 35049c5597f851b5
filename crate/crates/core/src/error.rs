use thiserror::Error;

/// Errors raised by the simulation and verification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("infinite p-moment (p = {p}): {reason}")]
    InfiniteMoment { p: f64, reason: String },

    #[error("compensator on window ({a}, {b}] is not finite")]
    NonFiniteCompensator { a: f64, b: f64 },

    #[error("negative time t = {0}")]
    NegativeTime(f64),

    #[error("exponential weight must be positive, got lambda = {0}")]
    NonPositiveWeight(f64),

    #[error("atom at t = {t} lies outside (0, {horizon}]")]
    AtomOutsideWindow { t: f64, horizon: f64 },

    #[error("point xi = {0} is not in the interior of the domain")]
    BoundaryPoint(f64),

    #[error("time grids do not match: {0}")]
    GridMismatch(String),

    #[error("at least {needed} levels are required, got {got}")]
    TooFewLevels { needed: usize, got: usize },

    #[error("replica budget exceeded: {completed} of {requested} replicas completed")]
    PartialResults { completed: usize, requested: usize },

    #[error("sampled {atoms} atoms, over the budget of {budget}")]
    AtomBudget { atoms: usize, budget: usize },

    #[error("quadrature did not reach tolerance: {0}")]
    Quadrature(String),

    #[error("malformed record: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
