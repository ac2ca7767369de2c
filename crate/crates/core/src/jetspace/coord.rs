use std::fmt;

use serde::{Deserialize, Serialize};

use super::JetError;

/// Names one coordinate of second-order jet space. Indices are 0-based.
///
/// Second derivatives are stored once per unordered pair; `D2 { i, j }` and
/// `D2 { j, i }` address the same coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum JetCoordinateId {
    Base(usize),
    Field(usize),
    D1 { field: usize, i: usize },
    D2 { field: usize, i: usize, j: usize },
}

impl JetCoordinateId {
    /// Canonical form with `i <= j` for second derivatives.
    pub fn normalized(self) -> Self {
        match self {
            JetCoordinateId::D2 { field, i, j } if i > j => JetCoordinateId::D2 { field, i: j, j: i },
            other => other,
        }
    }

    /// Weight pairing a prolongation coefficient with a partial derivative.
    ///
    /// Off-diagonal second-derivative coefficients carry `η_ij + η_ji`, while
    /// partials are taken with respect to the single unordered coordinate, so
    /// each off-diagonal pair contributes with weight one half.
    pub fn pairing_weight(self) -> f64 {
        match self {
            JetCoordinateId::D2 { i, j, .. } if i != j => 0.5,
            _ => 1.0,
        }
    }

    pub fn order(self) -> usize {
        match self {
            JetCoordinateId::Base(_) | JetCoordinateId::Field(_) => 0,
            JetCoordinateId::D1 { .. } => 1,
            JetCoordinateId::D2 { .. } => 2,
        }
    }

    pub fn field(self) -> Option<usize> {
        match self {
            JetCoordinateId::Base(_) => None,
            JetCoordinateId::Field(r) => Some(r),
            JetCoordinateId::D1 { field, .. } | JetCoordinateId::D2 { field, .. } => Some(field),
        }
    }
}

impl fmt::Display for JetCoordinateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            JetCoordinateId::Base(i) => write!(f, "x[{i}]"),
            JetCoordinateId::Field(r) => write!(f, "u[{r}]"),
            JetCoordinateId::D1 { field, i } => write!(f, "u[{field}]_{i}"),
            JetCoordinateId::D2 { field, i, j } => write!(f, "u[{field}]_{i}{j}"),
        }
    }
}

/// Sizes of a jet space: `n_base` base coordinates and `n_slots` field slots.
///
/// Coordinates are laid out as base, fields, first derivatives (field-major),
/// then second derivatives (field-major, upper triangle row by row).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JetShape {
    pub n_base: usize,
    pub n_slots: usize,
}

impl JetShape {
    pub fn new(n_base: usize, n_slots: usize) -> Result<Self, JetError> {
        if n_base == 0 || n_slots == 0 {
            return Err(JetError::InvalidShape(format!(
                "need n_base >= 1 and n_fields >= 1, got ({n_base}, {n_slots})"
            )));
        }
        Ok(JetShape { n_base, n_slots })
    }

    pub fn pairs(&self) -> usize {
        self.n_base * (self.n_base + 1) / 2
    }

    pub fn len(&self) -> usize {
        let (n, m) = (self.n_base, self.n_slots);
        n + m + m * n + m * self.pairs()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn tri(&self, i: usize, j: usize) -> usize {
        let n = self.n_base;
        i * n - i * i.saturating_sub(1) / 2 + (j - i)
    }

    pub fn contains(&self, id: JetCoordinateId) -> bool {
        let (n, m) = (self.n_base, self.n_slots);
        match id {
            JetCoordinateId::Base(i) => i < n,
            JetCoordinateId::Field(r) => r < m,
            JetCoordinateId::D1 { field, i } => field < m && i < n,
            JetCoordinateId::D2 { field, i, j } => field < m && i < n && j < n,
        }
    }

    /// Flat position of `id`.
    pub fn index(&self, id: JetCoordinateId) -> Result<usize, JetError> {
        if !self.contains(id) {
            return Err(JetError::OutOfRange {
                id,
                n_base: self.n_base,
                n_slots: self.n_slots,
            });
        }
        Ok(self.index_unchecked(id))
    }

    pub(crate) fn index_unchecked(&self, id: JetCoordinateId) -> usize {
        let (n, m) = (self.n_base, self.n_slots);
        match id.normalized() {
            JetCoordinateId::Base(i) => i,
            JetCoordinateId::Field(r) => n + r,
            JetCoordinateId::D1 { field, i } => n + m + field * n + i,
            JetCoordinateId::D2 { field, i, j } => {
                n + m + m * n + field * self.pairs() + self.tri(i, j)
            }
        }
    }

    /// Coordinate at flat position `k`.
    pub fn id_at(&self, k: usize) -> Option<JetCoordinateId> {
        self.coordinates().nth(k)
    }

    /// All coordinates in storage order.
    pub fn coordinates(&self) -> impl Iterator<Item = JetCoordinateId> + '_ {
        let (n, m) = (self.n_base, self.n_slots);
        let base = (0..n).map(JetCoordinateId::Base);
        let fields = (0..m).map(JetCoordinateId::Field);
        let d1 = (0..m).flat_map(move |field| (0..n).map(move |i| JetCoordinateId::D1 { field, i }));
        let d2 = (0..m).flat_map(move |field| {
            (0..n).flat_map(move |i| (i..n).map(move |j| JetCoordinateId::D2 { field, i, j }))
        });
        base.chain(fields).chain(d1).chain(d2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn enumeration_matches_count_and_index(n in 1usize..7, m in 1usize..4) {
            let shape = JetShape::new(n, m).unwrap();
            let ids: Vec<_> = shape.coordinates().collect();
            prop_assert_eq!(ids.len(), n + m + m * n + m * n * (n + 1) / 2);
            for (k, id) in ids.iter().enumerate() {
                prop_assert_eq!(shape.index(*id).unwrap(), k);
            }
        }

        #[test]
        fn second_derivatives_share_storage(n in 1usize..6, i in 0usize..6, j in 0usize..6) {
            prop_assume!(i < n && j < n);
            let shape = JetShape::new(n, 1).unwrap();
            let a = shape.index(JetCoordinateId::D2 { field: 0, i, j }).unwrap();
            let b = shape.index(JetCoordinateId::D2 { field: 0, i: j, j: i }).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn thirteen_coordinates_for_three_bases_one_field() {
        assert_eq!(JetShape::new(3, 1).unwrap().len(), 13);
    }

    #[test]
    fn out_of_range_is_rejected() {
        let shape = JetShape::new(3, 1).unwrap();
        assert!(shape.index(JetCoordinateId::D1 { field: 1, i: 2 }).is_err());
        assert!(shape.index(JetCoordinateId::Base(3)).is_err());
    }
}
