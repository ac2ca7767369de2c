use serde::{Deserialize, Serialize};

use super::JetError;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Euclidean,
    Minkowski,
}

/// Diagonal metric. Minkowski uses `diag(1, -1, ..., -1)` with index 0 timelike.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Metric {
    pub kind: MetricKind,
    pub dim: usize,
}

impl Metric {
    pub fn euclidean(dim: usize) -> Self {
        Metric {
            kind: MetricKind::Euclidean,
            dim,
        }
    }

    pub fn minkowski(dim: usize) -> Self {
        Metric {
            kind: MetricKind::Minkowski,
            dim,
        }
    }

    /// Diagonal entry `g_ii`.
    pub fn weight(&self, i: usize) -> f64 {
        match self.kind {
            MetricKind::Euclidean => 1.0,
            MetricKind::Minkowski if i == 0 => 1.0,
            MetricKind::Minkowski => -1.0,
        }
    }

    /// `Σ g_ii a_i b_i`.
    pub fn contract<T: Scalar>(&self, a: &[T], b: &[T]) -> Result<T, JetError> {
        for len in [a.len(), b.len()] {
            if len != self.dim {
                return Err(JetError::DimensionMismatch {
                    expected: self.dim,
                    got: len,
                });
            }
        }
        Ok(self.contract_unchecked(a, b))
    }

    pub(crate) fn contract_unchecked<T: Scalar>(&self, a: &[T], b: &[T]) -> T {
        a.iter()
            .zip(b)
            .enumerate()
            .fold(T::zero(), |acc, (i, (&x, &y))| {
                let term = x * y;
                if self.weight(i) < 0.0 {
                    acc - term
                } else {
                    acc + term
                }
            })
    }
}

/// How base coordinates are laid out and which of them carry tensor indices.
///
/// * `Euclidean { n }`: `n` base coordinates `x_1..x_n`, all contracted
///   with the identity.
/// * `Minkowski { n }`: `n + 1` base coordinates `x_0..x_n`, all contracted
///   with `diag(1, -1, ..., -1)`.
/// * `Galilean { n }`: `n + 1` base coordinates with index 0 the time `t`;
///   tensors range over the spatial indices `1..=n` only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Geometry {
    Euclidean { n: usize },
    Minkowski { n: usize },
    Galilean { n: usize },
}

impl Geometry {
    pub fn n(&self) -> usize {
        match *self {
            Geometry::Euclidean { n } | Geometry::Minkowski { n } | Geometry::Galilean { n } => n,
        }
    }

    pub fn n_base(&self) -> usize {
        match *self {
            Geometry::Euclidean { n } => n,
            Geometry::Minkowski { n } | Geometry::Galilean { n } => n + 1,
        }
    }

    /// Base indices that carry tensor indices, in order.
    pub fn tensor_indices(&self) -> std::ops::Range<usize> {
        match *self {
            Geometry::Euclidean { n } => 0..n,
            Geometry::Minkowski { n } => 0..n + 1,
            Geometry::Galilean { n } => 1..n + 1,
        }
    }

    /// Metric used to contract tensor indices.
    pub fn metric(&self) -> Metric {
        match *self {
            Geometry::Euclidean { n } | Geometry::Galilean { n } => Metric::euclidean(n),
            Geometry::Minkowski { n } => Metric::minkowski(n + 1),
        }
    }

    pub fn time_index(&self) -> Option<usize> {
        match self {
            Geometry::Galilean { .. } => Some(0),
            _ => None,
        }
    }

    /// Base index addressed by the symbol `x<k>` (1-based for euclidean,
    /// 0-based for the time-indexed geometries).
    pub fn base_for_symbol(&self, k: usize) -> Option<usize> {
        match *self {
            Geometry::Euclidean { n } => (1..=n).contains(&k).then(|| k - 1),
            Geometry::Minkowski { n } | Geometry::Galilean { n } => (k <= n).then_some(k),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    fn v(xs: &[f64]) -> Vec<C64> {
        xs.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn euclidean_sum_of_squares() {
        let a = v(&[1.0, 2.0, 2.0]);
        assert_eq!(Metric::euclidean(3).contract(&a, &a).unwrap().re, 9.0);
    }

    #[test]
    fn minkowski_null_vector() {
        let a = v(&[1.0, 1.0, 0.0, 0.0]);
        assert_eq!(Metric::minkowski(4).contract(&a, &a).unwrap().re, 0.0);
    }

    #[test]
    fn minkowski_timelike_only() {
        let a = v(&[3.0, 0.0]);
        assert_eq!(Metric::minkowski(2).contract(&a, &a).unwrap().re, 9.0);
    }

    #[test]
    fn contract_rejects_mismatch() {
        let a = v(&[1.0, 2.0]);
        let b = v(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            Metric::euclidean(2).contract(&a, &b),
            Err(JetError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn galilean_layout() {
        let g = Geometry::Galilean { n: 3 };
        assert_eq!(g.n_base(), 4);
        assert_eq!(g.tensor_indices(), 1..4);
        assert_eq!(g.base_for_symbol(0), Some(0));
        assert_eq!(Geometry::Euclidean { n: 3 }.base_for_symbol(0), None);
        assert_eq!(Geometry::Euclidean { n: 3 }.base_for_symbol(3), Some(2));
    }
}
