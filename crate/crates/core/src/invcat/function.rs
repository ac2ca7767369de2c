use std::fmt;
use std::sync::Arc;

use super::EvalError;
use crate::jetspace::{FieldKind, JetCoordinateId, JetPoint, JetShape};
use crate::verify::dual::DualScalar;
use crate::{Scalar, C64};

/// A jet point whose coordinates are dual numbers, i.e. a point together
/// with one tangent direction.
#[derive(Debug, Clone)]
pub struct DualJet {
    shape: JetShape,
    n_fields: usize,
    kind: FieldKind,
    values: Vec<DualScalar>,
}

impl DualJet {
    /// Lifts `p`; `tangent` (indexed like the point) seeds the derivative parts.
    pub fn new(p: &JetPoint, tangent: Option<&[C64]>) -> Self {
        let values = match tangent {
            Some(t) => p
                .values()
                .iter()
                .zip(t)
                .map(|(&v, &d)| DualScalar::new(v, d))
                .collect(),
            None => p.values().iter().map(|&v| DualScalar::constant(v)).collect(),
        };
        DualJet {
            shape: p.shape(),
            n_fields: p.n_fields(),
            kind: p.kind(),
            values,
        }
    }

    fn seeded(p: &JetPoint, k: usize) -> Self {
        let mut jet = DualJet::new(p, None);
        jet.values[k].deriv = C64::new(1.0, 0.0);
        jet
    }

    pub fn shape(&self) -> JetShape {
        self.shape
    }

    pub fn n_base(&self) -> usize {
        self.shape.n_base
    }

    pub fn n_slots(&self) -> usize {
        self.shape.n_slots
    }

    pub fn n_fields(&self) -> usize {
        self.n_fields
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn get(&self, id: JetCoordinateId) -> DualScalar {
        self.values[self.shape.index_unchecked(id)]
    }

    pub fn x(&self, i: usize) -> DualScalar {
        self.get(JetCoordinateId::Base(i))
    }

    pub fn u(&self, r: usize) -> DualScalar {
        self.get(JetCoordinateId::Field(r))
    }

    pub fn du(&self, r: usize, i: usize) -> DualScalar {
        self.get(JetCoordinateId::D1 { field: r, i })
    }

    pub fn ddu(&self, r: usize, i: usize, j: usize) -> DualScalar {
        self.get(JetCoordinateId::D2 { field: r, i, j })
    }

    /// Conjugate partner slot of `r` (identity for real points).
    pub fn conj_slot(&self, r: usize) -> usize {
        match self.kind {
            FieldKind::Real => r,
            FieldKind::Complex => (r + self.n_fields) % (2 * self.n_fields),
        }
    }
}

type EvalFn = dyn Fn(&DualJet) -> Result<DualScalar, EvalError> + Send + Sync;

/// A differentiable map from jet points to scalars: the unit of candidate
/// invariants and equation residuals.
#[derive(Clone)]
pub struct ScalarJetFunction {
    label: String,
    deps: Option<Vec<JetCoordinateId>>,
    f: Arc<EvalFn>,
}

impl fmt::Debug for ScalarJetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarJetFunction")
            .field("label", &self.label)
            .field("deps", &self.deps.as_ref().map(Vec::len))
            .finish()
    }
}

impl ScalarJetFunction {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&DualJet) -> Result<DualScalar, EvalError> + Send + Sync + 'static,
    {
        ScalarJetFunction {
            label: label.into(),
            deps: None,
            f: Arc::new(f),
        }
    }

    /// Restricts differentiation to the given coordinates.
    pub fn with_deps(mut self, deps: Vec<JetCoordinateId>) -> Self {
        self.deps = Some(deps);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Declared dependency set, or every coordinate of `shape`.
    pub fn deps(&self, shape: JetShape) -> Vec<JetCoordinateId> {
        match &self.deps {
            Some(d) => d.iter().copied().filter(|id| shape.contains(*id)).collect(),
            None => shape.coordinates().collect(),
        }
    }

    pub fn eval_dual(&self, jet: &DualJet) -> Result<DualScalar, EvalError> {
        (self.f)(jet)
    }

    pub fn eval(&self, p: &JetPoint) -> Result<C64, EvalError> {
        let v = self.eval_dual(&DualJet::new(p, None))?.value;
        if !is_finite(v) {
            return Err(EvalError::NonFinite {
                label: self.label.clone(),
                coordinate: None,
            });
        }
        Ok(v)
    }

    /// Value and derivative along `tangent`.
    pub fn directional(&self, p: &JetPoint, tangent: &[C64]) -> Result<DualScalar, EvalError> {
        self.eval_dual(&DualJet::new(p, Some(tangent)))
    }

    /// Partial derivatives with respect to every coordinate (zero outside the
    /// dependency set), one forward pass per dependency.
    pub fn grad(&self, p: &JetPoint) -> Result<Vec<C64>, EvalError> {
        let shape = p.shape();
        let mut g = vec![C64::new(0.0, 0.0); shape.len()];
        for id in self.deps(shape) {
            let k = shape.index_unchecked(id);
            let d = self.eval_dual(&DualJet::seeded(p, k))?.deriv;
            if !is_finite(d) {
                return Err(EvalError::NonFinite {
                    label: self.label.clone(),
                    coordinate: Some(id),
                });
            }
            g[k] = d;
        }
        Ok(g)
    }

    /// Pointwise combination of two functions.
    pub fn combine<F>(&self, other: &ScalarJetFunction, label: impl Into<String>, op: F) -> Self
    where
        F: Fn(DualScalar, DualScalar) -> DualScalar + Send + Sync + 'static,
    {
        let (a, b) = (self.clone(), other.clone());
        let deps = match (&self.deps, &other.deps) {
            (Some(x), Some(y)) => {
                let mut d = x.clone();
                d.extend(y.iter().copied().filter(|id| !x.contains(id)));
                Some(d)
            }
            _ => None,
        };
        ScalarJetFunction {
            label: label.into(),
            deps,
            f: Arc::new(move |jet| Ok(op(a.eval_dual(jet)?, b.eval_dual(jet)?))),
        }
    }

    /// The jet coordinate `id` itself.
    pub fn coordinate(id: JetCoordinateId) -> Self {
        ScalarJetFunction::new(id.to_string(), move |jet| Ok(jet.get(id))).with_deps(vec![id])
    }

    pub fn constant(label: impl Into<String>, c: C64) -> Self {
        ScalarJetFunction::new(label, move |_| Ok(DualScalar::from_c64(c))).with_deps(vec![])
    }
}

pub(crate) fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
