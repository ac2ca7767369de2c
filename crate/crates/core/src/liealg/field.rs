use std::fmt;

use super::coef::{Coef, Var};
use crate::C64;

/// Infinitesimal generator `ξ^i(x,u) ∂_{x_i} + η^r(x,u) ∂_{u^r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub label: String,
    pub xi: Vec<Coef>,
    pub eta: Vec<Coef>,
}

impl VectorField {
    pub fn zero(label: impl Into<String>, n_base: usize, n_slots: usize) -> Self {
        VectorField {
            label: label.into(),
            xi: vec![Coef::zero(); n_base],
            eta: vec![Coef::zero(); n_slots],
        }
    }

    pub fn n_base(&self) -> usize {
        self.xi.len()
    }

    pub fn n_slots(&self) -> usize {
        self.eta.len()
    }

    /// `Σ c_k X_k`; all fields must share the same `(x, u)`-space.
    pub fn linear_combination(label: impl Into<String>, terms: &[(C64, &VectorField)]) -> Self {
        let (n, m) = terms
            .first()
            .map_or((0, 0), |(_, f)| (f.n_base(), f.n_slots()));
        let mut out = VectorField::zero(label, n, m);
        for (c, f) in terms {
            assert_eq!((f.n_base(), f.n_slots()), (n, m), "mismatched vector fields");
            for (a, b) in out.xi.iter_mut().zip(&f.xi) {
                *a = a.clone() + Coef::Const(*c) * b.clone();
            }
            for (a, b) in out.eta.iter_mut().zip(&f.eta) {
                *a = a.clone() + Coef::Const(*c) * b.clone();
            }
        }
        out
    }

    /// Coefficient functions in `(ξ^0, …, ξ^{N-1}, η^0, …)` order.
    pub(crate) fn components(&self) -> impl Iterator<Item = &Coef> {
        self.xi.iter().chain(&self.eta)
    }

    pub(crate) fn var(&self, v: usize) -> Var {
        if v < self.n_base() {
            Var::X(v)
        } else {
            Var::U(v - self.n_base())
        }
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.xi.iter().enumerate() {
            if !c.is_zero() {
                terms.push(format!("{c}·∂x{i}"));
            }
        }
        for (r, c) in self.eta.iter().enumerate() {
            if !c.is_zero() {
                terms.push(format!("{c}·∂u{r}"));
            }
        }
        if terms.is_empty() {
            write!(f, "{}: 0", self.label)
        } else {
            write!(f, "{}: {}", self.label, terms.join(" + "))
        }
    }
}
