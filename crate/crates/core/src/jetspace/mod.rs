//! Second-order jet coordinates over `N` base coordinates and `m` scalar
//! fields, with metric contraction and generic-point sampling.

mod coord;
mod metric;
mod point;
mod sample;

pub use coord::{JetCoordinateId, JetShape};
pub use metric::{Geometry, Metric, MetricKind};
pub use point::{FieldKind, JetPoint};
pub use sample::{sample_generic, sample_with, SampleOptions};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("jet coordinate {id} out of range for N = {n_base}, slots = {n_slots}")]
    OutOfRange {
        id: JetCoordinateId,
        n_base: usize,
        n_slots: usize,
    },
    #[error("invalid jet shape: {0}")]
    InvalidShape(String),
}
