//! Vector fields on `(x, u)`-space, their second prolongations and the
//! catalog of named symmetry algebras.

mod catalog;
pub mod coef;
mod field;
mod prolong;

use thiserror::Error;

pub use catalog::{catalog, AlgebraName, AlgebraSpec, ApInfConfig, ApInfFunctions, Chart};
pub use field::VectorField;
pub use prolong::{apply, coefficient_matrix, generic_rank, pair_with_gradient, prolong2, ProlongedOperator};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("unknown algebra `{0}`")]
    UnknownAlgebra(String),
    #[error("invalid algebra parameters: {0}")]
    InvalidParams(String),
}
