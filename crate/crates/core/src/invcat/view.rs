use super::tensor::Mat;
use super::DualJet;
use crate::jetspace::{Geometry, Metric};
use crate::verify::dual::DualScalar;
use crate::Scalar;

type D = DualScalar;

/// Tensor-index access to a dual jet under a geometry.
#[derive(Clone, Copy)]
pub struct JetView<'a> {
    pub jet: &'a DualJet,
    pub geometry: Geometry,
}

impl<'a> JetView<'a> {
    pub fn new(jet: &'a DualJet, geometry: Geometry) -> Self {
        JetView { jet, geometry }
    }

    pub fn metric(&self) -> Metric {
        self.geometry.metric()
    }

    /// Number of tensor indices.
    pub fn dim(&self) -> usize {
        self.geometry.tensor_indices().len()
    }

    pub fn u(&self, r: usize) -> D {
        self.jet.u(r)
    }

    pub fn conj(&self, r: usize) -> usize {
        self.jet.conj_slot(r)
    }

    pub fn x(&self) -> Vec<D> {
        self.geometry.tensor_indices().map(|i| self.jet.x(i)).collect()
    }

    pub fn grad(&self, r: usize) -> Vec<D> {
        self.geometry.tensor_indices().map(|i| self.jet.du(r, i)).collect()
    }

    pub fn hess(&self, r: usize) -> Mat<D> {
        let idx: Vec<usize> = self.geometry.tensor_indices().collect();
        idx.iter()
            .map(|&i| idx.iter().map(|&j| self.jet.ddu(r, i, j)).collect())
            .collect()
    }

    /// Time coordinate (Galilean geometry).
    pub fn t(&self) -> D {
        self.jet.x(self.time())
    }

    pub fn ut(&self, r: usize) -> D {
        self.jet.du(r, self.time())
    }

    pub fn utt(&self, r: usize) -> D {
        let t = self.time();
        self.jet.ddu(r, t, t)
    }

    /// Mixed derivatives `u_{at}` over the tensor indices.
    pub fn uat(&self, r: usize) -> Vec<D> {
        let t = self.time();
        self.geometry.tensor_indices().map(|i| self.jet.ddu(r, i, t)).collect()
    }

    fn time(&self) -> usize {
        self.geometry.time_index().expect("time derivative in a geometry without time")
    }

    /// `Σ g_ii a_i b_i`.
    pub fn dot(&self, a: &[D], b: &[D]) -> D {
        self.metric().contract_unchecked(a, b)
    }

    /// `tr(G M)`.
    pub fn trace(&self, m: &Mat<D>) -> D {
        let g = self.metric();
        (0..m.len()).fold(D::zero(), |acc, i| acc + m[i][i].scale(g.weight(i)))
    }
}
