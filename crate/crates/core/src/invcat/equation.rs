use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::basis::{Gal, Reading};
use super::covariant::{eikonal_theta, w_tensor};
use super::tensor::{dot, lower_vec, mat_vec, s_k};
use super::view::JetView;
use super::{EvalError, ScalarJetFunction};
use crate::jetspace::JetCoordinateId;
use crate::liealg::{AlgebraError, AlgebraName, AlgebraSpec, ApInfConfig, Chart};
use crate::verify::dual::DualScalar;
use crate::verify::Sampler;
use crate::{Scalar, C64};

type D = DualScalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationName {
    /// `2μu_t + Δu = 0`.
    Heat,
    /// `2imψ_t + ψ_aa = 0`.
    Schrodinger,
    /// `(1 − u_αu_α)u_μμ ∓ u_αu_μu_αμ = 0`.
    BornInfeld,
    /// `u_αu_α = 0`.
    Eikonal,
    /// `S_k(θ_μν) = 0` with the eikonal-covariant `θ`.
    EikonalTrace,
    /// `u_μu_μνu_ν − u_μu_μu_αα = 0`.
    QuasilinearEikonal,
    /// `u_αu_α u_νν/(1−n) − u_μu_νu_μν = (u_νu_ν)² F(u)`.
    ConformalW,
    /// Projective Galilei-invariant equation for a real field.
    GalileiReal,
    /// Projective Galilei-invariant equation for a complex field.
    GalileiComplex,
}

impl EquationName {
    pub const ALL: [EquationName; 9] = [
        EquationName::Heat,
        EquationName::Schrodinger,
        EquationName::BornInfeld,
        EquationName::Eikonal,
        EquationName::EikonalTrace,
        EquationName::QuasilinearEikonal,
        EquationName::ConformalW,
        EquationName::GalileiReal,
        EquationName::GalileiComplex,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EquationName::Heat => "heat",
            EquationName::Schrodinger => "schrodinger",
            EquationName::BornInfeld => "born-infeld",
            EquationName::Eikonal => "eikonal",
            EquationName::EikonalTrace => "eikonal-trace",
            EquationName::QuasilinearEikonal => "quasilinear-eikonal",
            EquationName::ConformalW => "conformal-w",
            EquationName::GalileiReal => "galilei-real",
            EquationName::GalileiComplex => "galilei-complex",
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            EquationName::Heat => "2 mu u_t + u_aa = 0",
            EquationName::Schrodinger => "2 i m psi_t + psi_aa = 0",
            EquationName::BornInfeld => "(1 - u_a u_a) u_mm - u_a u_m u_am = 0",
            EquationName::Eikonal => "u_a u_a = 0",
            EquationName::EikonalTrace => "S_k(theta_mn) = 0, theta_mn covariant under the eikonal algebra",
            EquationName::QuasilinearEikonal => "u_m u_mn u_n - u_m u_m u_aa = 0",
            EquationName::ConformalW => "u_a u_a u_nn/(1-n) - u_m u_n u_mn = (u_n u_n)^2 F(u)",
            EquationName::GalileiReal => "N2 = mu^2 N1^2 F  (phi = log u)",
            EquationName::GalileiComplex => "N2 = -m^2 N1^2 F  (complex phi = log psi)",
        }
    }

    pub fn algebra(self) -> AlgebraName {
        match self {
            EquationName::Heat | EquationName::GalileiReal => AlgebraName::Ag2I,
            EquationName::Schrodinger | EquationName::GalileiComplex => AlgebraName::Ag2II,
            EquationName::BornInfeld => AlgebraName::ApBornInfeld,
            EquationName::Eikonal | EquationName::EikonalTrace | EquationName::QuasilinearEikonal => {
                AlgebraName::ApInf
            }
            EquationName::ConformalW => AlgebraName::AC1n,
        }
    }
}

impl fmt::Display for EquationName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EquationName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EquationName::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| format!("unknown equation `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquationParams {
    pub n: usize,
    /// Trace order for `eikonal-trace`.
    pub k: usize,
    pub mu: f64,
    pub mass: f64,
    /// Constant value of the free function `F`.
    pub coupling: f64,
    pub reading: Reading,
    pub apinf: ApInfConfig,
}

impl Default for EquationParams {
    fn default() -> Self {
        EquationParams {
            n: 3,
            k: 1,
            mu: 1.0,
            mass: 1.0,
            coupling: 0.5,
            reading: Reading::Printed,
            apinf: ApInfConfig::default(),
        }
    }
}

/// An equation together with the algebra it is claimed to be invariant under.
#[derive(Debug, Clone)]
pub struct Equation {
    pub name: EquationName,
    pub anchor: String,
    pub spec: AlgebraSpec,
    pub residual: ScalarJetFunction,
    /// Coordinate moved by the Newton projection (`None`: pick the steepest).
    pub solve_for: Option<JetCoordinateId>,
    pub sampler: Sampler,
}

pub fn equation(name: EquationName, params: &EquationParams) -> Result<Equation, AlgebraError> {
    let n = params.n;
    let spec = match name {
        EquationName::Heat => AlgebraSpec::new(AlgebraName::Ag2I, n).mu(params.mu).chart(Chart::Linear),
        EquationName::Schrodinger => AlgebraSpec::new(AlgebraName::Ag2II, n).mass(params.mass).chart(Chart::Linear),
        EquationName::GalileiReal => AlgebraSpec::new(AlgebraName::Ag2I, n).mu(params.mu),
        EquationName::GalileiComplex => AlgebraSpec::new(AlgebraName::Ag2II, n).mass(params.mass),
        EquationName::BornInfeld => AlgebraSpec::new(AlgebraName::ApBornInfeld, n),
        EquationName::Eikonal | EquationName::EikonalTrace => {
            AlgebraSpec::new(AlgebraName::ApInf, n).apinf(params.apinf.clone())
        }
        EquationName::QuasilinearEikonal => AlgebraSpec::new(AlgebraName::ApInf, n).apinf(ApInfConfig {
            with_dilation: true,
            ..params.apinf.clone()
        }),
        EquationName::ConformalW => AlgebraSpec::new(AlgebraName::AC1n, n).lambda(0.0),
    };
    spec.validate()?;
    if name == EquationName::EikonalTrace && params.k == 0 {
        return Err(AlgebraError::InvalidParams("eikonal-trace needs k >= 1".into()));
    }
    let geom = spec.geometry();
    let label = match name {
        EquationName::EikonalTrace => format!("{name} k={}", params.k),
        _ => name.to_string(),
    };
    let p = params.clone();
    let f = move |v: &JetView<'_>| -> Result<D, EvalError> { residual(name, v, &p) };
    let residual_fn = ScalarJetFunction::new(label, move |jet| f(&JetView::new(jet, geom)));
    let time = JetCoordinateId::D1 { field: 0, i: 0 };
    let solve_for = match name {
        EquationName::Heat | EquationName::Schrodinger | EquationName::Eikonal => Some(time),
        EquationName::GalileiReal | EquationName::GalileiComplex => Some(JetCoordinateId::D2 { field: 0, i: 0, j: 0 }),
        EquationName::BornInfeld => Some(JetCoordinateId::D2 { field: 0, i: 0, j: 0 }),
        _ => None,
    };
    let anchor = match name {
        EquationName::Heat => "heat equation, generalized Galilei algebra",
        EquationName::Schrodinger => "free Schroedinger equation, generalized Galilei algebra",
        EquationName::BornInfeld => "Born-Infeld equation, Poincare algebra AP(1,n+1) with x_{n+1} = u",
        EquationName::Eikonal => "eikonal equation, infinite-dimensional algebra",
        EquationName::EikonalTrace => "S_k of the eikonal-covariant tensor, infinite-dimensional algebra",
        EquationName::QuasilinearEikonal => "quasi-linear eikonal-type equation, infinite algebra with d(u) dilations",
        EquationName::ConformalW => "conformal equation built from the trace of w, lambda = 0",
        EquationName::GalileiReal => "projective Galilei invariant equation, real field",
        EquationName::GalileiComplex => "projective Galilei invariant equation, complex field",
    };
    Ok(Equation {
        name,
        anchor: anchor.to_string(),
        sampler: Sampler::for_spec(&spec),
        spec,
        residual: residual_fn,
        solve_for,
    })
}

fn residual(name: EquationName, v: &JetView<'_>, p: &EquationParams) -> Result<D, EvalError> {
    let metric = v.metric();
    let (g, h) = (v.grad(0), v.hess(0));
    let gg = v.dot(&g, &g);
    let box_u = v.trace(&h);
    // u_μ u_ν u_μν with both indices raised
    let gug = || {
        let lg = lower_vec(&g, &metric);
        dot(&lg, &mat_vec(&h, &lg))
    };
    let c = D::from_f64(p.coupling);
    Ok(match name {
        EquationName::Heat => D::from_f64(2.0 * p.mu) * v.ut(0) + box_u,
        EquationName::Schrodinger => D::from_c64(C64::new(0.0, 2.0 * p.mass)) * v.ut(0) + box_u,
        EquationName::BornInfeld => {
            let sign = if p.reading == Reading::Corrected { 1.0 } else { -1.0 };
            (D::one() - gg) * box_u + gug().scale(sign)
        }
        EquationName::Eikonal => gg,
        EquationName::EikonalTrace => s_k(&eikonal_theta(v, 0), &metric, p.k),
        EquationName::QuasilinearEikonal => gug() - gg * box_u,
        EquationName::ConformalW => {
            let nn = v.dim() as f64;
            (gg * box_u).scale(1.0 / (2.0 - nn)) - gug() - gg * gg * c * v.u(0) * v.u(0)
        }
        EquationName::GalileiReal | EquationName::GalileiComplex => {
            let (mu, f) = if name == EquationName::GalileiReal {
                (C64::new(p.mu, 0.0), C64::new(p.mu * p.mu * p.coupling, 0.0))
            } else {
                (C64::new(0.0, p.mass), C64::new(p.coupling, 0.0))
            };
            let nn = v.dim() as f64;
            let gamma = if p.reading == Reading::Corrected { 0.5 / nn } else { 1.0 / nn };
            let gal = Gal { r: 0, mu, n: nn };
            let n1 = gal.n1(v);
            gal.n2(v, gamma) - n1 * n1 * D::from_c64(f)
        }
    })
}

/// `w_μμ` and the left side `u_αu_α u_νν/(1−n) − u_μu_νu_μν` of the conformal
/// equation, for the identity check.
pub fn conformal_w_sides(v: &JetView<'_>, covariant: bool) -> (D, D) {
    let metric = v.metric();
    let w = w_tensor(v, 0, covariant);
    let (g, h) = (v.grad(0), v.hess(0));
    let gg = v.dot(&g, &g);
    let lg = lower_vec(&g, &metric);
    let lhs = (gg * v.trace(&h)).scale(1.0 / (2.0 - v.dim() as f64)) - dot(&lg, &mat_vec(&h, &lg));
    (v.trace(&w), lhs)
}

/// Equations paired with their algebras for `list equations`.
pub fn equation_listing() -> Vec<(EquationName, AlgebraName, &'static str)> {
    EquationName::ALL.iter().map(|&e| (e, e.algebra(), e.formula())).collect()
}

