//! Numerical checks of the quantitative estimates and independent oracles.

pub mod estimates;
pub mod report;
pub mod skorohod;

pub use estimates::{
    apriori_bound_check, apriori_ensemble_check, cauchy_decay_fit, fit_decay, grid_summary, moment_estimate,
    moment_estimate_paths, ou_oracle, sup_increment_check, DecayFit, SummaryRow,
};
pub use report::{bootstrap, linear_fit, mean, variance, write_summary_csv, Bootstrap, EstimateReport, BOOTSTRAP_RESAMPLES};
pub use skorohod::{skorohod_distance, uniform_distance};
