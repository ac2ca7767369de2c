use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::tensor::{lower_vec, mat_vec, Mat};
use super::view::JetView;
use super::{DualJet, EvalError};
use crate::jetspace::Geometry;
use crate::linalg::solve;
use crate::verify::dual::DualScalar;
use crate::{Scalar, C64};

type D = DualScalar;

/// Output of a tensor builder.
#[derive(Debug, Clone, PartialEq)]
pub enum TensorValue<T> {
    Vector(Vec<T>),
    Matrix(Mat<T>),
}

impl<T: Scalar> TensorValue<T> {
    pub fn components(&self) -> Vec<T> {
        match self {
            TensorValue::Vector(v) => v.clone(),
            TensorValue::Matrix(m) => m.iter().flatten().copied().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TensorValue::Vector(v) => v.len(),
            TensorValue::Matrix(m) => m.len(),
        }
    }

    pub fn is_matrix(&self) -> bool {
        matches!(self, TensorValue::Matrix(_))
    }
}

/// Every named covariant tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TensorName {
    /// `u_a`.
    Grad,
    /// `u_ab`.
    Hess,
    /// `x_a`.
    X,
    /// `λu_ab + (1−λ)u_a u_b/u − g_ab u_c u_c/(2u)`.
    Theta,
    /// Conformal tensor for `λ = 0` with the printed trace coefficient.
    W,
    /// `w` with the trace coefficient `1/(2 − N)` in every signature.
    WCovariant,
    /// `u_μ^r/u^r − u_μ^1/u^1`.
    ThetaVec,
    /// Rank-two tensor covariant under the eikonal algebra.
    EikonalTheta,
    /// `μφ_at + φ_b φ_ab`.
    GalileiTheta,
    /// `φ_ab − (2δ_ab/n)(φ_c φ_c + μφ_t)`.
    GalileiThetaAb,
    /// `μx_a − tφ_a`.
    H,
    /// `μx_a/t − φ_a`.
    HHat,
    /// Solution of `φ_ab θ_b = φ_at`.
    ImplicitTheta,
    /// Projective vector for `μ = 0`: `h_a/t + (2/n)tφ_aφ_t + (4/n)x_bφ_bφ_a/t`,
    /// `h_a = x_bφ_ab + tφ_at`.
    HHatZero,
}

impl TensorName {
    pub const ALL: [TensorName; 14] = [
        TensorName::Grad,
        TensorName::Hess,
        TensorName::X,
        TensorName::Theta,
        TensorName::W,
        TensorName::WCovariant,
        TensorName::ThetaVec,
        TensorName::EikonalTheta,
        TensorName::GalileiTheta,
        TensorName::GalileiThetaAb,
        TensorName::H,
        TensorName::HHat,
        TensorName::ImplicitTheta,
        TensorName::HHatZero,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TensorName::Grad => "grad",
            TensorName::Hess => "hess",
            TensorName::X => "x",
            TensorName::Theta => "theta",
            TensorName::W => "w",
            TensorName::WCovariant => "w-covariant",
            TensorName::ThetaVec => "theta-vec",
            TensorName::EikonalTheta => "eikonal-theta",
            TensorName::GalileiTheta => "galilei-theta",
            TensorName::GalileiThetaAb => "galilei-theta-ab",
            TensorName::H => "h",
            TensorName::HHat => "h-hat",
            TensorName::ImplicitTheta => "implicit-theta",
            TensorName::HHatZero => "h-hat-zero",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            TensorName::Grad => "u_a",
            TensorName::Hess => "u_ab",
            TensorName::X => "x_a",
            TensorName::Theta => "lambda u_ab + (1-lambda) u_a u_b/u - g_ab u_c u_c/(2u)  (conformal, lambda != 0)",
            TensorName::W => "u_c u_c (u_ab + c g_ab u_dd) - u_c (u_a u_bc + u_b u_ac), c as printed  (conformal, lambda = 0)",
            TensorName::WCovariant => "w with c = 1/(2 - N) in every signature",
            TensorName::ThetaVec => "u^r_a/u^r - u^1_a/u^1",
            TensorName::EikonalTheta => "u_m u_ln u_l + u_n u_lm u_l - u_m u_n u_ll - u_l u_l u_mn  (eikonal algebra)",
            TensorName::GalileiTheta => "mu phi_at + phi_b phi_ab  (Galilei, mu != 0)",
            TensorName::GalileiThetaAb => "phi_ab - (2/n) delta_ab (phi_c phi_c + mu phi_t)",
            TensorName::H => "mu x_a - t phi_a",
            TensorName::HHat => "mu x_a / t - phi_a",
            TensorName::ImplicitTheta => "theta solving phi_ab theta_b = phi_at  (Galilei, mu = 0)",
            TensorName::HHatZero => "h_a/t + (2/n) t phi_a phi_t + (4/n) x_b phi_b phi_a / t  (Galilei, mu = 0)",
        }
    }
}

impl fmt::Display for TensorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TensorName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TensorName::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown tensor `{s}`"))
    }
}

/// Parameters shared by the tensor formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorParams {
    pub lambda: f64,
    /// Galilei coupling (`μ`, or `±i m` for a complex field).
    pub mu: C64,
    /// Field slot the tensor is built from.
    pub field: usize,
    /// Reference slot for relative tensors (`θ_μ`).
    pub reference: usize,
}

impl Default for TensorParams {
    fn default() -> Self {
        TensorParams {
            lambda: 1.0,
            mu: C64::new(1.0, 0.0),
            field: 0,
            reference: 0,
        }
    }
}

type BuildFn = dyn Fn(&DualJet) -> Result<TensorValue<D>, EvalError> + Send + Sync;

/// Builds a vector or symmetric matrix from a jet point.
#[derive(Clone)]
pub struct TensorBuilder {
    label: String,
    geometry: Geometry,
    build: Arc<BuildFn>,
}

impl fmt::Debug for TensorBuilder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TensorBuilder").field("label", &self.label).finish()
    }
}

impl TensorBuilder {
    pub fn new<F>(label: impl Into<String>, geometry: Geometry, f: F) -> Self
    where
        F: Fn(&JetView<'_>) -> Result<TensorValue<D>, EvalError> + Send + Sync + 'static,
    {
        TensorBuilder {
            label: label.into(),
            geometry,
            build: Arc::new(move |jet| f(&JetView::new(jet, geometry))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn build(&self, jet: &DualJet) -> Result<TensorValue<D>, EvalError> {
        (self.build)(jet)
    }
}

/// The builder for `name` under `geometry`.
pub fn covariant_tensor(name: TensorName, geometry: Geometry, params: TensorParams) -> TensorBuilder {
    let label = format!("{name}[{}]", params.field + 1);
    TensorBuilder::new(label, geometry, move |v| eval_tensor(name, v, &params))
}

pub(crate) fn eval_tensor(
    name: TensorName,
    v: &JetView<'_>,
    p: &TensorParams,
) -> Result<TensorValue<D>, EvalError> {
    let r = p.field;
    Ok(match name {
        TensorName::Grad => TensorValue::Vector(v.grad(r)),
        TensorName::Hess => TensorValue::Matrix(v.hess(r)),
        TensorName::X => TensorValue::Vector(v.x()),
        TensorName::Theta => TensorValue::Matrix(theta(v, r, p.lambda)),
        TensorName::W => TensorValue::Matrix(w_tensor(v, r, false)),
        TensorName::WCovariant => TensorValue::Matrix(w_tensor(v, r, true)),
        TensorName::ThetaVec => TensorValue::Vector(theta_vec(v, r, p.reference)),
        TensorName::EikonalTheta => TensorValue::Matrix(eikonal_theta(v, r)),
        TensorName::GalileiTheta => TensorValue::Vector(galilei_theta(v, r, p.mu)),
        TensorName::GalileiThetaAb => {
            let n = v.dim() as f64;
            let g = v.grad(r);
            let s = v.dot(&g, &g) + D::from_c64(p.mu) * v.ut(r);
            let mut m = v.hess(r);
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = row[i] - s.scale(2.0 / n);
            }
            TensorValue::Matrix(m)
        }
        TensorName::H => {
            let (x, g, t) = (v.x(), v.grad(r), v.t());
            let mu = D::from_c64(p.mu);
            TensorValue::Vector(x.iter().zip(&g).map(|(&x, &g)| mu * x - t * g).collect())
        }
        TensorName::HHat => {
            let (x, g, t) = (v.x(), v.grad(r), v.t());
            let mu = D::from_c64(p.mu);
            TensorValue::Vector(x.iter().zip(&g).map(|(&x, &g)| mu * x / t - g).collect())
        }
        TensorName::ImplicitTheta => TensorValue::Vector(implicit_theta(v, r)?),
        TensorName::HHatZero => {
            let n = v.dim() as f64;
            let (x, g, t, h) = (v.x(), v.grad(r), v.t(), v.hess(r));
            let (ut, uat) = (v.ut(r), v.uat(r));
            let hx = mat_vec(&h, &x);
            let xg = v.dot(&x, &g);
            TensorValue::Vector(
                (0..g.len())
                    .map(|a| {
                        let ha = hx[a] + t * uat[a];
                        ha / t + (t * g[a] * ut).scale(2.0 / n) + (xg * g[a] / t).scale(4.0 / n)
                    })
                    .collect(),
            )
        }
    })
}

pub(crate) fn theta(v: &JetView<'_>, r: usize, lambda: f64) -> Mat<D> {
    let (u, g, h) = (v.u(r), v.grad(r), v.hess(r));
    let metric = v.metric();
    let gg = v.dot(&g, &g);
    let l = D::from_f64(lambda);
    (0..g.len())
        .map(|a| {
            (0..g.len())
                .map(|b| {
                    let mut e = l * h[a][b] + (D::one() - l) * g[a] * g[b] / u;
                    if a == b {
                        e = e - (gg / (u + u)).scale(metric.weight(a));
                    }
                    e
                })
                .collect()
        })
        .collect()
}

/// `w_ab = (u·u)(u_ab + c g_ab □u) − u_c(u_a u_bc + u_b u_ac)` with
/// `c = 1/(2 − N)`, except that the printed Minkowski form flips the sign.
pub(crate) fn w_tensor(v: &JetView<'_>, r: usize, covariant: bool) -> Mat<D> {
    let (g, h) = (v.grad(r), v.hess(r));
    let metric = v.metric();
    let n = g.len() as f64;
    let minkowski = v.geometry.time_index().is_none() && matches!(v.geometry, Geometry::Minkowski { .. });
    let c = if minkowski && !covariant { -1.0 / (2.0 - n) } else { 1.0 / (2.0 - n) };
    let gg = v.dot(&g, &g);
    let box_u = v.trace(&h);
    // (U G u)_a = Σ_c u_ac g_cc u_c
    let hu = mat_vec(&h, &lower_vec(&g, &metric));
    (0..g.len())
        .map(|a| {
            (0..g.len())
                .map(|b| {
                    let mut e = gg * h[a][b] - (g[a] * hu[b] + g[b] * hu[a]);
                    if a == b {
                        e = e + (gg * box_u).scale(c * metric.weight(a));
                    }
                    e
                })
                .collect()
        })
        .collect()
}

pub(crate) fn theta_vec(v: &JetView<'_>, r: usize, reference: usize) -> Vec<D> {
    let (ur, u1) = (v.u(r), v.u(reference));
    v.grad(r)
        .iter()
        .zip(v.grad(reference))
        .map(|(&a, b)| a / ur - b / u1)
        .collect()
}

pub(crate) fn eikonal_theta(v: &JetView<'_>, r: usize) -> Mat<D> {
    let (g, h) = (v.grad(r), v.hess(r));
    let metric = v.metric();
    let gg = v.dot(&g, &g);
    let box_u = v.trace(&h);
    let hu = mat_vec(&h, &lower_vec(&g, &metric));
    (0..g.len())
        .map(|m| {
            (0..g.len())
                .map(|n| g[m] * hu[n] + g[n] * hu[m] - g[m] * g[n] * box_u - gg * h[m][n])
                .collect()
        })
        .collect()
}

pub(crate) fn galilei_theta(v: &JetView<'_>, r: usize, mu: C64) -> Vec<D> {
    let (g, h, uat) = (v.grad(r), v.hess(r), v.uat(r));
    let hg = mat_vec(&h, &g);
    let mu = D::from_c64(mu);
    uat.iter().zip(hg).map(|(&a, b)| mu * a + b).collect()
}

pub(crate) fn implicit_theta(v: &JetView<'_>, r: usize) -> Result<Vec<D>, EvalError> {
    solve(&v.hess(r), &v.uat(r)).ok_or_else(|| EvalError::Singular("degenerate Hessian".into()))
}

/// `(u¹·u¹) (Uʳ − Δʳ(ε̂))` with `ε̂ = U¹ G u¹ / (u¹·u¹)` and
/// `Δʳ(ε) = ε uʳᵀ + uʳ εᵀ − (ε·uʳ) g`.
///
/// For `λ = 0` the conformal generators shift every Hessian by `Δʳ(ε)` with a
/// common `ε`; `ε̂` absorbs that shift, so the result is covariant and, unlike
/// `wʳ`, keeps all components of `Uʳ`.
pub(crate) fn shift_free(v: &JetView<'_>, r: usize, reference: usize) -> Mat<D> {
    let metric = v.metric();
    let (g1, h1) = (v.grad(reference), v.hess(reference));
    let s1 = v.dot(&g1, &g1);
    let eps: Vec<D> = mat_vec(&h1, &lower_vec(&g1, &metric)).into_iter().map(|e| e / s1).collect();
    let (gr, hr) = (v.grad(r), v.hess(r));
    let eu = v.dot(&eps, &gr);
    (0..gr.len())
        .map(|a| {
            (0..gr.len())
                .map(|b| {
                    let mut d = eps[a] * gr[b] + gr[a] * eps[b];
                    if a == b {
                        d = d - eu.scale(metric.weight(a));
                    }
                    s1 * (hr[a][b] - d)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetspace::{sample_generic, FieldKind, JetCoordinateId, JetPoint};

    fn build(name: TensorName, geom: Geometry, p: &JetPoint, params: TensorParams) -> TensorValue<D> {
        covariant_tensor(name, geom, params).build(&DualJet::new(p, None)).unwrap()
    }

    #[test]
    fn theta_at_unit_lambda() {
        let geom = Geometry::Euclidean { n: 3 };
        let p = sample_generic(3, 1, FieldKind::Real, 4).unwrap();
        let params = TensorParams { lambda: 1.0, ..Default::default() };
        let TensorValue::Matrix(t) = build(TensorName::Theta, geom, &p, params) else { panic!() };
        let gg: C64 = (0..3).map(|a| p.du(0, a) * p.du(0, a)).sum();
        for a in 0..3 {
            for b in 0..3 {
                let mut want = p.ddu(0, a, b);
                if a == b {
                    want -= gg / (2.0 * p.u(0));
                }
                assert!((t[a][b].value - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn implicit_theta_diagonal() {
        let geom = Geometry::Galilean { n: 3 };
        let mut p = sample_generic(4, 1, FieldKind::Real, 9).unwrap();
        for a in 1..4 {
            for b in a + 1..4 {
                p.set(JetCoordinateId::D2 { field: 0, i: a, j: b }, C64::new(0.0, 0.0)).unwrap();
            }
        }
        let TensorValue::Vector(t) = build(TensorName::ImplicitTheta, geom, &p, TensorParams::default()) else {
            panic!()
        };
        for a in 1..4 {
            let want = p.ddu(0, a, 0) / p.ddu(0, a, a);
            assert!((t[a - 1].value - want).norm() < 1e-14);
        }
    }

    #[test]
    fn implicit_theta_rejects_singular_hessian() {
        let geom = Geometry::Galilean { n: 2 };
        let mut p = sample_generic(3, 1, FieldKind::Real, 1).unwrap();
        for a in 1..3 {
            for b in a..3 {
                p.set(JetCoordinateId::D2 { field: 0, i: a, j: b }, C64::new(1.0, 0.0)).unwrap();
            }
        }
        let err = covariant_tensor(TensorName::ImplicitTheta, geom, TensorParams::default())
            .build(&DualJet::new(&p, None))
            .unwrap_err();
        assert!(err.to_string().contains("degenerate Hessian"));
    }

    #[test]
    fn symmetric_outputs() {
        let geom = Geometry::Minkowski { n: 3 };
        let p = sample_generic(4, 1, FieldKind::Real, 2).unwrap();
        for name in [TensorName::Theta, TensorName::W, TensorName::WCovariant, TensorName::EikonalTheta] {
            let TensorValue::Matrix(m) = build(name, geom, &p, TensorParams::default()) else { panic!() };
            for a in 0..4 {
                for b in 0..4 {
                    assert!((m[a][b].value - m[b][a].value).norm() < 1e-13, "{name}");
                }
            }
        }
    }
}
