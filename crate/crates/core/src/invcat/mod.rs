//! Scalar functions on the jet space and the catalog of invariant bases.

mod basis;
mod equation;
mod function;
pub mod tensor;
mod covariant;
mod view;

use thiserror::Error;

use crate::jetspace::JetCoordinateId;

pub use basis::{
    basis, basis_listing, basis_with, jet_deps, trace_products, vectors_and_tensors, BasisError, BasisFamily,
    BasisListing, Reading,
};
pub use equation::{conformal_w_sides, equation, equation_listing, Equation, EquationName, EquationParams};
pub(crate) use covariant::eval_tensor;
pub use covariant::{covariant_tensor, TensorBuilder, TensorName, TensorParams, TensorValue};
pub use function::{DualJet, ScalarJetFunction};
pub use view::JetView;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("non-finite value in `{label}`{}", coordinate.map(|c| format!(" (at {c})")).unwrap_or_default())]
    NonFinite {
        label: String,
        coordinate: Option<JetCoordinateId>,
    },
    #[error("singular matrix in `{0}`")]
    Singular(String),
    #[error("outside domain: {0}")]
    Domain(String),
}
