//! Numerical verification: invariance (absolute and on a solution manifold),
//! functional independence, completeness accounting and tensor covariance.

mod covariance;
pub mod dual;
mod invariance;
mod rank;
mod report;
mod sampler;

use thiserror::Error;

use crate::invcat::EvalError;

pub use covariance::check_covariance;
pub use invariance::{check_absolute, check_on_manifold, project_onto, DEFAULT_SAMPLES, DEFAULT_TOL};
pub use rank::{completeness, independence_rank, independence_rank_at};
pub use report::{
    CompletenessReport, CovarianceEntry, CovarianceReport, InvarianceEntry, InvarianceReport, RankReport,
    Verdict,
};
pub use sampler::Sampler;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("evaluation failed at every retry: {0}")]
    Evaluation(EvalError),
    #[error("Newton projection onto `{0}` did not converge")]
    Projection(String),
    #[error("invalid request: {0}")]
    Invalid(String),
}
