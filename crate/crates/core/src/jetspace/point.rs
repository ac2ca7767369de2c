use serde::{Deserialize, Serialize};

use super::{JetCoordinateId, JetError, JetShape};
use crate::{Scalar, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Real,
    Complex,
}

impl FieldKind {
    /// Storage slots per physical field: complex fields carry `(φ, φ*)`.
    pub fn slots_per_field(self) -> usize {
        match self {
            FieldKind::Real => 1,
            FieldKind::Complex => 2,
        }
    }
}

/// Numeric values of all second-order jet coordinates at one point.
///
/// For [`FieldKind::Complex`] there are `2m` slots: slot `r + m` holds the
/// conjugate partner of slot `r`. Differentiation treats the two as
/// independent coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetPoint {
    shape: JetShape,
    n_fields: usize,
    kind: FieldKind,
    values: Vec<C64>,
}

impl JetPoint {
    /// All-zero point.
    pub fn zeros(n_base: usize, n_fields: usize, kind: FieldKind) -> Result<Self, JetError> {
        let shape = JetShape::new(n_base, n_fields * kind.slots_per_field())?;
        Ok(JetPoint {
            shape,
            n_fields,
            kind,
            values: vec![C64::new(0.0, 0.0); shape.len()],
        })
    }

    pub fn from_values(
        n_base: usize,
        n_fields: usize,
        kind: FieldKind,
        values: Vec<C64>,
    ) -> Result<Self, JetError> {
        let mut p = Self::zeros(n_base, n_fields, kind)?;
        if values.len() != p.values.len() {
            return Err(JetError::DimensionMismatch {
                expected: p.values.len(),
                got: values.len(),
            });
        }
        p.values = values;
        Ok(p)
    }

    pub fn shape(&self) -> JetShape {
        self.shape
    }

    pub fn n_base(&self) -> usize {
        self.shape.n_base
    }

    pub fn n_fields(&self) -> usize {
        self.n_fields
    }

    pub fn n_slots(&self) -> usize {
        self.shape.n_slots
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    /// Slot holding the conjugate partner of `slot`; a real slot is its own partner.
    pub fn conj_slot(&self, slot: usize) -> usize {
        match self.kind {
            FieldKind::Real => slot,
            FieldKind::Complex => (slot + self.n_fields) % (2 * self.n_fields),
        }
    }

    pub fn get(&self, id: JetCoordinateId) -> Result<C64, JetError> {
        Ok(self.values[self.shape.index(id)?])
    }

    pub fn set(&mut self, id: JetCoordinateId, value: C64) -> Result<(), JetError> {
        let k = self.shape.index(id)?;
        self.values[k] = value;
        Ok(())
    }

    /// Writes `value` and, for complex points, its conjugate into the partner slot.
    pub fn set_with_partner(&mut self, id: JetCoordinateId, value: C64) -> Result<(), JetError> {
        self.set(id, value)?;
        if self.kind == FieldKind::Complex {
            if let Some(partner) = partner_id(id, self.conj_slot(id.field().unwrap_or(0))) {
                self.set(partner, value.conj())?;
            }
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> C64 {
        self.values[self.shape.index_unchecked(JetCoordinateId::Base(i))]
    }

    pub fn u(&self, r: usize) -> C64 {
        self.values[self.shape.index_unchecked(JetCoordinateId::Field(r))]
    }

    pub fn du(&self, r: usize, i: usize) -> C64 {
        self.values[self.shape.index_unchecked(JetCoordinateId::D1 { field: r, i })]
    }

    pub fn ddu(&self, r: usize, i: usize, j: usize) -> C64 {
        self.values[self.shape.index_unchecked(JetCoordinateId::D2 { field: r, i, j })]
    }

    /// Multiplies every coordinate by `factor`.
    pub fn scaled(&self, factor: f64) -> JetPoint {
        let mut p = self.clone();
        for v in &mut p.values {
            *v = v.scale(factor);
        }
        p
    }

    /// Change of dependent variable `u = exp φ`, applied slot-wise through
    /// second order: `φ_i = u_i/u`, `φ_ij = u_ij/u - u_i u_j/u²`.
    pub fn to_log_chart(&self) -> JetPoint {
        let mut out = self.clone();
        let n = self.n_base();
        for r in 0..self.n_slots() {
            let u = self.u(r);
            out.put(JetCoordinateId::Field(r), crate::scalar::c64_ln(u));
            for i in 0..n {
                out.put(JetCoordinateId::D1 { field: r, i }, self.du(r, i) / u);
                for j in i..n {
                    let v = self.ddu(r, i, j) / u - self.du(r, i) * self.du(r, j) / (u * u);
                    out.put(JetCoordinateId::D2 { field: r, i, j }, v);
                }
            }
        }
        out
    }

    /// Inverse of [`JetPoint::to_log_chart`]: `u = e^φ`, `u_i = e^φ φ_i`,
    /// `u_ij = e^φ (φ_ij + φ_i φ_j)`.
    pub fn from_log_chart(&self) -> JetPoint {
        let mut out = self.clone();
        let n = self.n_base();
        for r in 0..self.n_slots() {
            let e = crate::scalar::c64_exp(self.u(r));
            out.put(JetCoordinateId::Field(r), e);
            for i in 0..n {
                out.put(JetCoordinateId::D1 { field: r, i }, e * self.du(r, i));
                for j in i..n {
                    let v = e * (self.ddu(r, i, j) + self.du(r, i) * self.du(r, j));
                    out.put(JetCoordinateId::D2 { field: r, i, j }, v);
                }
            }
        }
        out
    }

    fn put(&mut self, id: JetCoordinateId, v: C64) {
        let k = self.shape.index_unchecked(id);
        self.values[k] = v;
    }
}

fn partner_id(id: JetCoordinateId, partner: usize) -> Option<JetCoordinateId> {
    match id {
        JetCoordinateId::Base(_) => None,
        JetCoordinateId::Field(_) => Some(JetCoordinateId::Field(partner)),
        JetCoordinateId::D1 { i, .. } => Some(JetCoordinateId::D1 { field: partner, i }),
        JetCoordinateId::D2 { i, j, .. } => Some(JetCoordinateId::D2 { field: partner, i, j }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn symmetric_write_read() {
        let mut p = JetPoint::zeros(3, 1, FieldKind::Real).unwrap();
        p.set(JetCoordinateId::D2 { field: 0, i: 0, j: 1 }, c(5.0)).unwrap();
        assert_eq!(p.get(JetCoordinateId::D2 { field: 0, i: 1, j: 0 }).unwrap(), c(5.0));
    }

    #[test]
    fn field_value_round_trip() {
        let mut p = JetPoint::zeros(3, 1, FieldKind::Real).unwrap();
        p.set(JetCoordinateId::Field(0), c(7.0)).unwrap();
        assert_eq!(p.get(JetCoordinateId::Field(0)).unwrap(), c(7.0));
    }

    #[test]
    fn second_field_missing_on_single_field_point() {
        let p = JetPoint::zeros(3, 1, FieldKind::Real).unwrap();
        assert!(matches!(
            p.get(JetCoordinateId::D1 { field: 1, i: 2 }),
            Err(JetError::OutOfRange { .. })
        ));
    }

    #[test]
    fn complex_partner_slots() {
        let mut p = JetPoint::zeros(2, 1, FieldKind::Complex).unwrap();
        assert_eq!(p.n_slots(), 2);
        assert_eq!(p.conj_slot(0), 1);
        assert_eq!(p.conj_slot(1), 0);
        p.set_with_partner(JetCoordinateId::D1 { field: 0, i: 1 }, C64::new(1.0, 2.0))
            .unwrap();
        assert_eq!(p.du(1, 1), C64::new(1.0, -2.0));
    }

    #[test]
    fn log_chart_round_trip() {
        let mut p = JetPoint::zeros(2, 1, FieldKind::Real).unwrap();
        for (k, v) in p.values_mut().iter_mut().enumerate() {
            *v = c(0.7 + 0.1 * k as f64);
        }
        let back = p.to_log_chart().from_log_chart();
        for (a, b) in p.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
