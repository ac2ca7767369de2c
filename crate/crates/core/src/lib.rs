//! Second-order differential invariants of the rotation group and its
//! extensions (Euclid, Poincaré, Galilei, conformal and projective algebras),
//! together with a numerical engine that checks invariance, functional
//! independence and completeness of the bases.
//!
//! The crate is organised bottom-up:
//!
//! * [`jetspace`]: second-order jet coordinates, metrics and generic sampling.
//! * [`liealg`]: vector fields on `(x, u)`, their second prolongation and the
//!   catalog of algebras.
//! * [`invcat`]: closed-form invariants, covariant tensors and equation
//!   residuals.
//! * [`verify`]: forward-mode differentiation, invariance and rank checks.
//! * [`exprlang`]: a small expression language over jet symbols.

pub mod exprlang;
pub mod invcat;
pub mod jetspace;
pub mod liealg;
pub mod linalg;
pub mod scalar;
pub mod verify;

pub use num_complex::Complex64 as C64;
pub use scalar::Scalar;
