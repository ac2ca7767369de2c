use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::covariant::{galilei_theta, implicit_theta, shift_free, theta, theta_vec, w_tensor};
use super::tensor::{dot, mat_pow, mat_vec, r_0, r_k, s_jk, s_k, shifted, Mat};
use super::view::JetView;
use super::{EvalError, ScalarJetFunction};
use crate::jetspace::{Geometry, JetCoordinateId, JetShape};
use crate::liealg::{AlgebraError, AlgebraName, AlgebraSpec, Chart};
use crate::linalg::{inverse, solve};
use crate::verify::dual::DualScalar;
use crate::verify::Sampler;
use crate::{Scalar, C64};

type D = DualScalar;

/// Which reading of formulas with suspect coefficients to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Reading {
    /// Exactly as printed.
    #[default]
    Printed,
    /// Printed, except `(φ_aa)^{k−l}` in the projective `R̂_k` sums.
    Binomial,
    /// Weight-consistent forms: shifted-trace projective invariants,
    /// `φ_bb²/(2n)` in `N_2`, `+im` in the complex Galilei vector, exponents
    /// matching the dilation weights, the covariant Minkowski `w`.
    Corrected,
}

impl FromStr for Reading {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "printed" => Ok(Reading::Printed),
            "binomial" => Ok(Reading::Binomial),
            "corrected" => Ok(Reading::Corrected),
            _ => Err(format!("unknown reading `{s}` (printed | binomial | corrected)")),
        }
    }
}

impl fmt::Display for Reading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reading::Printed => "printed",
            Reading::Binomial => "binomial",
            Reading::Corrected => "corrected",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("no basis is listed for {0}")]
    NoBasis(String),
}

/// A candidate functional basis of second-order invariants.
#[derive(Debug, Clone)]
pub struct BasisFamily {
    pub name: String,
    pub anchor: String,
    pub spec: AlgebraSpec,
    pub members: Vec<ScalarJetFunction>,
    /// Size predicted by counting variables minus the algebra rank.
    pub expected_count: usize,
    /// Coordinates the family may depend on.
    pub deps: Vec<JetCoordinateId>,
    pub sampler: Sampler,
}

impl BasisFamily {
    pub fn labels(&self) -> Vec<String> {
        self.members.iter().map(|m| m.label().to_string()).collect()
    }

    /// The family without its last `k` members.
    pub fn truncated(&self, k: usize) -> BasisFamily {
        let mut out = self.clone();
        out.members.truncate(self.members.len().saturating_sub(k));
        out
    }
}

struct Builder {
    geometry: Geometry,
    deps: Arc<Vec<JetCoordinateId>>,
    members: Vec<ScalarJetFunction>,
}

impl Builder {
    fn new(geometry: Geometry, deps: Vec<JetCoordinateId>) -> Self {
        Builder {
            geometry,
            deps: Arc::new(deps),
            members: Vec::new(),
        }
    }

    fn add<F>(&mut self, label: impl Into<String>, f: F)
    where
        F: Fn(&JetView<'_>) -> Result<D, EvalError> + Send + Sync + 'static,
    {
        let geometry = self.geometry;
        let func = ScalarJetFunction::new(label, move |jet| f(&JetView::new(jet, geometry)))
            .with_deps(self.deps.as_ref().clone());
        self.members.push(func);
    }
}

/// Base coordinates (optional), then for each slot its value (optional) and
/// all first and second derivatives.
pub fn jet_deps(shape: JetShape, slots: &[usize], base: bool, values: bool) -> Vec<JetCoordinateId> {
    let mut out = Vec::new();
    if base {
        out.extend((0..shape.n_base).map(JetCoordinateId::Base));
    }
    for &r in slots {
        if values {
            out.push(JetCoordinateId::Field(r));
        }
        for i in 0..shape.n_base {
            out.push(JetCoordinateId::D1 { field: r, i });
        }
        for i in 0..shape.n_base {
            for j in i..shape.n_base {
                out.push(JetCoordinateId::D2 { field: r, i, j });
            }
        }
    }
    out
}

fn pw(x: D, e: f64) -> D {
    x.powf(e)
}

fn binom(a: i64, b: i64) -> f64 {
    if b < 0 || b > a {
        return 0.0;
    }
    (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64)
}

fn fact(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `R_k` extended with `R_0 = vᵀ M⁻¹ v`.
fn rk_ext(v: &JetView<'_>, vec: &[D], m: &Mat<D>, k: usize) -> Result<D, EvalError> {
    if k == 0 {
        r_0(vec, m).ok_or_else(|| EvalError::Singular("R_0".into()))
    } else {
        Ok(r_k(vec, m, &v.metric(), k))
    }
}

fn rk(v: &JetView<'_>, vec: &[D], m: &Mat<D>, k: usize) -> D {
    r_k(vec, m, &v.metric(), k)
}

fn sk(v: &JetView<'_>, m: &Mat<D>, k: usize) -> D {
    s_k(m, &v.metric(), k)
}

fn sjk(v: &JetView<'_>, a: &Mat<D>, b: &Mat<D>, j: usize, k: usize) -> D {
    s_jk(a, b, &v.metric(), j, k)
}

/// Default family of `spec` as printed.
pub fn basis(spec: &AlgebraSpec) -> Result<BasisFamily, BasisError> {
    basis_with(spec, Reading::Printed)
}

pub fn basis_with(spec: &AlgebraSpec, reading: Reading) -> Result<BasisFamily, BasisError> {
    spec.validate()?;
    let no_basis = |why: &str| Err(BasisError::NoBasis(format!("{} ({why})", spec.name)));
    if spec.name.is_galilei() {
        if spec.m != 1 {
            return no_basis("Galilei bases are listed for one field");
        }
        if spec.chart != Chart::Log {
            return no_basis("Galilei bases act on the log chart");
        }
    }
    let family = match spec.name {
        AlgebraName::AO | AlgebraName::AE | AlgebraName::AE1 | AlgebraName::AC => euclid_like(spec, reading),
        AlgebraName::AP | AlgebraName::APtilde | AlgebraName::AC1n => euclid_like(spec, reading),
        AlgebraName::AgI | AlgebraName::Ag1I | AlgebraName::Ag2I => {
            if spec.mu.unwrap_or(0.0) != 0.0 {
                galilei_real(spec, reading)
            } else {
                galilei_real_zero(spec)
            }
        }
        AlgebraName::AgII | AlgebraName::Ag1II | AlgebraName::Ag2II => {
            if spec.mass.unwrap_or(0.0) != 0.0 {
                galilei_complex(spec, reading)
            } else if spec.name == AlgebraName::Ag2II {
                galilei_complex_zero(spec, reading)
            } else {
                return no_basis("the massless complex case is listed for AG2_II only");
            }
        }
        AlgebraName::ApInf | AlgebraName::ApBornInfeld => {
            return no_basis("only invariant equations are listed for this algebra")
        }
    };
    Ok(family)
}

fn finish(spec: &AlgebraSpec, name: String, anchor: &str, b: Builder, expected: usize) -> BasisFamily {
    BasisFamily {
        name,
        anchor: anchor.to_string(),
        spec: spec.clone(),
        members: b.members,
        expected_count: expected,
        deps: Arc::try_unwrap(b.deps).unwrap_or_else(|a| a.as_ref().clone()),
        sampler: Sampler::for_spec(spec),
    }
}

/// Euclid, conformal and Poincaré families; the metric decides the signature.
fn euclid_like(spec: &AlgebraSpec, reading: Reading) -> BasisFamily {
    let geom = spec.geometry();
    let shape = spec.shape();
    let nn = geom.tensor_indices().len();
    let m = spec.m;
    let lambda = spec.effective_lambda().unwrap_or(0.0);
    let slots: Vec<usize> = (0..m).collect();
    let with_x = spec.name == AlgebraName::AO;
    let mut b = Builder::new(geom, jet_deps(shape, &slots, with_x, true));
    let tri = nn * (nn + 1) / 2;
    let sig = if matches!(geom, Geometry::Minkowski { .. }) { "mu" } else { "a" };
    let (name, anchor, expected);
    match spec.name {
        AlgebraName::AO | AlgebraName::AE | AlgebraName::AP => {
            for r in 0..m {
                b.add(format!("u{}", r + 1), move |v| Ok(v.u(r)));
            }
            for k in 1..=nn {
                b.add(format!("S_{k}(u1_{sig}{sig})"), move |v| Ok(sk(v, &v.hess(0), k)));
            }
            for r in 1..m {
                for k in 1..=nn {
                    // AP pairs (u^r, u^1) with j counting u^r; the Euclid forms pair
                    // (u^1, u^r) with j counting u^1.
                    let js: Vec<usize> = if spec.name == AlgebraName::AP { (1..=k).collect() } else { (0..k).collect() };
                    for j in js {
                        if spec.name == AlgebraName::AP {
                            b.add(format!("S_{j},{k}(u{}, u1)", r + 1), move |v| {
                                Ok(sjk(v, &v.hess(r), &v.hess(0), j, k))
                            });
                        } else {
                            b.add(format!("S_{j},{k}(u1, u{})", r + 1), move |v| {
                                Ok(sjk(v, &v.hess(0), &v.hess(r), j, k))
                            });
                        }
                    }
                }
            }
            for r in 0..m {
                for k in 1..=nn {
                    b.add(format!("R_{k}(u{}_{sig}, u1)", r + 1), move |v| Ok(rk(v, &v.grad(r), &v.hess(0), k)));
                }
            }
            if with_x {
                for k in 1..=nn {
                    b.add(format!("R_{k}(x, u1)"), move |v| Ok(rk(v, &v.x(), &v.hess(0), k)));
                }
            }
            let n = nn;
            match spec.name {
                AlgebraName::AO => {
                    name = "AO(n) basis with coordinates";
                    anchor = "rotation invariants of x_a, u^r, u^r_a, u^r_ab";
                    expected = m + n + (m - 1) * tri + m * n + n;
                }
                AlgebraName::AE => {
                    name = "AE(n) basis";
                    anchor = "Euclid invariants u^r, S_jk(u^1_ab, u^r_ab), R_k(u^r_a, u^1_ab)";
                    expected = 2 * m * n + m + (m - 1) * n * (n - 1) / 2;
                }
                _ => {
                    name = "AP(1,n) m-field basis";
                    anchor = "Poincare invariants u^r, R_k(u^r_mu, u^1_mu_nu), S_jk(u^r_mu_nu, u^1_mu_nu)";
                    let sn = n - 1;
                    expected = m * (2 * sn + 3) + (m - 1) * sn * (sn + 1) / 2;
                }
            }
        }
        AlgebraName::AE1 | AlgebraName::APtilde => {
            let euclid = spec.name == AlgebraName::AE1;
            if lambda != 0.0 {
                let e_s = move |k: usize| if euclid { -(k as f64) * (1.0 - 2.0 / lambda) } else { k as f64 * (2.0 / lambda - 1.0) };
                let e_r = move |k: usize| {
                    if euclid {
                        -(k as f64 * (1.0 - 2.0 / lambda) + 1.0)
                    } else {
                        2.0 * k as f64 / lambda - k as f64 - 1.0
                    }
                };
                for r in 1..m {
                    b.add(format!("u{}/u1", r + 1), move |v| Ok(v.u(r) / v.u(0)));
                }
                for k in 1..=nn {
                    b.add(format!("S_{k}(u1) u1^({:.4})", e_s(k)), move |v| Ok(sk(v, &v.hess(0), k) * pw(v.u(0), e_s(k))));
                }
                for r in 1..m {
                    for k in 1..=nn {
                        let js: Vec<usize> = if euclid { (0..k).collect() } else { (1..=k).collect() };
                        for j in js {
                            let (p, q) = if euclid { (0, r) } else { (r, 0) };
                            b.add(format!("S_{j},{k}(u{}, u{}) u1^({:.4})", p + 1, q + 1, e_s(k)), move |v| {
                                Ok(sjk(v, &v.hess(p), &v.hess(q), j, k) * pw(v.u(0), e_s(k)))
                            });
                        }
                    }
                }
                for r in 0..m {
                    for k in 1..=nn {
                        b.add(format!("R_{k}(u{}_{sig}, u1) u1^({:.4})", r + 1, e_r(k)), move |v| {
                            Ok(rk(v, &v.grad(r), &v.hess(0), k) * pw(v.u(0), e_r(k)))
                        });
                    }
                }
            } else {
                for r in 0..m {
                    b.add(format!("u{}", r + 1), move |v| Ok(v.u(r)));
                }
                for r in 0..m {
                    for k in 1..=nn {
                        b.add(format!("R_{k}(u{}_{sig}, u1) (u1_{sig}{sig})^-{k}", r + 1), move |v| {
                            let h = v.hess(0);
                            Ok(rk(v, &v.grad(r), &h, k) * v.trace(&h).powi(-(k as i32)))
                        });
                    }
                }
                for k in 2..=nn {
                    b.add(format!("S_{k}(u1) (u1_{sig}{sig})^-{k}"), move |v| {
                        let h = v.hess(0);
                        Ok(sk(v, &h, k) * v.trace(&h).powi(-(k as i32)))
                    });
                }
                for r in 1..m {
                    for k in 1..=nn {
                        let js: Vec<usize> = if euclid { (0..k).collect() } else { (1..=k).collect() };
                        for j in js {
                            let (p, q) = if euclid { (0, r) } else { (r, 0) };
                            b.add(format!("S_{j},{k}(u{}, u{}) (u1_{sig}{sig})^-{k}", p + 1, q + 1), move |v| {
                                let h = v.hess(0);
                                Ok(sjk(v, &v.hess(p), &v.hess(q), j, k) * v.trace(&h).powi(-(k as i32)))
                            });
                        }
                    }
                }
            }
            if euclid {
                name = "AE1(n) basis";
                anchor = "extended Euclid invariants, dilation weight lambda";
            } else {
                name = "extended AP(1,n) basis";
                anchor = "extended Poincare invariants, dilation weight lambda";
            }
            expected = m * (1 + nn + tri) - nn * (nn - 1) / 2 - 1;
        }
        AlgebraName::AC | AlgebraName::AC1n => {
            let minkowski = spec.name == AlgebraName::AC1n;
            if lambda != 0.0 {
                let e_s = move |k: usize| k as f64 * (2.0 / lambda - 1.0);
                let e_r = move |k: usize| {
                    let base = k as f64 * (2.0 / lambda - 1.0);
                    if reading == Reading::Corrected {
                        base + 1.0
                    } else {
                        base - 1.0
                    }
                };
                for k in 1..=nn {
                    b.add(format!("S_{k}(theta1) u1^({:.4})", e_s(k)), move |v| {
                        Ok(sk(v, &theta(v, 0, lambda), k) * pw(v.u(0), e_s(k)))
                    });
                }
                for r in 1..m {
                    for k in 1..=nn {
                        for j in 1..=k {
                            b.add(format!("S_{j},{k}(theta{}, theta1) u1^({:.4})", r + 1, e_s(k)), move |v| {
                                Ok(sjk(v, &theta(v, r, lambda), &theta(v, 0, lambda), j, k) * pw(v.u(0), e_s(k)))
                            });
                        }
                    }
                    b.add(format!("u{}/u1", r + 1), move |v| Ok(v.u(r) / v.u(0)));
                    for k in 1..=nn {
                        b.add(format!("R_{k}(theta{}_{sig}, theta1) u1^({:.4})", r + 1, e_r(k)), move |v| {
                            Ok(rk(v, &theta_vec(v, r, 0), &theta(v, 0, lambda), k) * pw(v.u(0), e_r(k)))
                        });
                    }
                }
            } else {
                let cov = !minkowski || reading == Reading::Corrected;
                for r in 0..m {
                    b.add(format!("u{}", r + 1), move |v| Ok(v.u(r)));
                }
                for k in 1..nn {
                    b.add(format!("S_{k}(w1) (u1.u1)^-{}", 2 * k), move |v| {
                        let g = v.grad(0);
                        Ok(sk(v, &w_tensor(v, 0, cov), k) * v.dot(&g, &g).powi(-2 * k as i32))
                    });
                }
                for r in 1..m {
                    for k in 1..=nn {
                        let js: Vec<usize> = if minkowski { (1..=k).collect() } else { (0..k).collect() };
                        for j in js {
                            let (p, q) = if minkowski { (r, 0) } else { (0, r) };
                            let tensor = move |v: &JetView<'_>, s: usize| {
                                if s == 0 || reading != Reading::Corrected {
                                    w_tensor(v, s, cov)
                                } else {
                                    shift_free(v, s, 0)
                                }
                            };
                            let t = if reading == Reading::Corrected { "W" } else { "w" };
                            let lab = |s: usize| if s == 0 { "w1".to_string() } else { format!("{t}{}", s + 1) };
                            b.add(format!("S_{j},{k}({}, {}) (u1.u1)^-{}", lab(p), lab(q), 2 * k), move |v| {
                                let g = v.grad(0);
                                Ok(sjk(v, &tensor(v, p), &tensor(v, q), j, k) * v.dot(&g, &g).powi(-2 * k as i32))
                            });
                        }
                    }
                    for k in 1..=nn {
                        b.add(format!("R_{k}(u{}_{sig}, w1) (u1.u1)^{}", r + 1, 1 - 2 * k as i32), move |v| {
                            let g = v.grad(0);
                            Ok(rk(v, &v.grad(r), &w_tensor(v, 0, cov), k) * v.dot(&g, &g).powi(1 - 2 * k as i32))
                        });
                    }
                }
            }
            if minkowski {
                name = "AC(1,n) basis";
                anchor = "conformal invariants built from covariant theta / w tensors (Minkowski)";
            } else {
                name = "AC(n) basis";
                anchor = "conformal invariants built from covariant theta / w tensors";
            }
            expected = m * (1 + nn + tri) - tri - 1;
        }
        _ => unreachable!("not a Euclid-like algebra"),
    }
    let branch = match spec.name {
        AlgebraName::AE1 | AlgebraName::APtilde | AlgebraName::AC | AlgebraName::AC1n => {
            if lambda == 0.0 {
                ", lambda = 0"
            } else {
                ", lambda != 0"
            }
        }
        _ => "",
    };
    finish(spec, format!("{name}{branch}"), anchor, b, expected)
}

/// Scalar building blocks of the Galilei families for slot `r` with coupling `mu`.
#[derive(Clone, Copy)]
pub(crate) struct Gal {
    pub r: usize,
    pub mu: C64,
    pub n: f64,
}

impl Gal {
    fn m1(&self, v: &JetView<'_>) -> D {
        let g = v.grad(self.r);
        D::from_c64(self.mu * 2.0) * v.ut(self.r) + v.dot(&g, &g)
    }

    fn m2(&self, v: &JetView<'_>) -> D {
        let (g, h, at) = (v.grad(self.r), v.hess(self.r), v.uat(self.r));
        let mu = D::from_c64(self.mu);
        mu * mu * v.utt(self.r) + (mu + mu) * v.dot(&g, &at) + dot(&g, &mat_vec(&h, &g))
    }

    pub fn n1(&self, v: &JetView<'_>) -> D {
        self.m1(v) + v.trace(&v.hess(self.r))
    }

    pub fn n2(&self, v: &JetView<'_>, gamma: f64) -> D {
        let (g, h, at) = (v.grad(self.r), v.hess(self.r), v.uat(self.r));
        let mu = D::from_c64(self.mu);
        let tr = v.trace(&h);
        let gg = v.dot(&g, &g);
        mu * mu * v.utt(self.r)
            + (mu + mu) * ((v.ut(self.r) * tr).scale(1.0 / self.n) + v.dot(&g, &at))
            + dot(&g, &mat_vec(&h, &g))
            + (gg * tr).scale(1.0 / self.n)
            + (tr * tr).scale(gamma)
    }
}

/// `R̂_k` for vector `vec` and matrix `h` under the chosen reading.
fn r_hat(v: &JetView<'_>, vec: &[D], h: &Mat<D>, k: usize, n: usize, reading: Reading) -> Result<D, EvalError> {
    let tr = v.trace(h);
    if reading == Reading::Corrected {
        let a = mat_pow(&shifted(h, &v.metric()), k - 1);
        return Ok(dot(vec, &mat_vec(&a, vec)));
    }
    let mut s = D::zero();
    for l in 0..=k {
        let e = if reading == Reading::Binomial { (k - l) as i32 } else { k as i32 - 1 };
        let c = (-(n as f64)).powi(l as i32) * binom(k as i64, l as i64);
        s = s + (rk_ext(v, vec, h, l)? * tr.powi(e)).scale(c);
    }
    Ok(s)
}

/// Real-field `Ŝ_k`.
fn s_hat(v: &JetView<'_>, h: &Mat<D>, k: usize, n: usize, reading: Reading) -> D {
    if reading == Reading::Corrected {
        return sk(v, &mat_pow(&shifted(h, &v.metric()), k), 1);
    }
    let tr = v.trace(h);
    let mut s = D::zero();
    for l in 0..=k {
        let c = (-(n as f64)).powi(l as i32) * fact(k - 1) * (k + 1) as f64 / (fact(l + 1) * fact(k - l));
        s = s + (sk(v, h, l) * tr.powi((k - l) as i32)).scale(c);
    }
    s
}

fn galilei_real(spec: &AlgebraSpec, reading: Reading) -> BasisFamily {
    let geom = spec.geometry();
    let n = spec.n;
    let mu = spec.mu.unwrap_or(1.0);
    let g = Gal {
        r: 0,
        mu: C64::new(mu, 0.0),
        n: n as f64,
    };
    let mut b = Builder::new(geom, jet_deps(spec.shape(), &[0], false, false));
    let cmu = C64::new(mu, 0.0);
    let (name, anchor, expected);
    match spec.name {
        AlgebraName::AgI => {
            b.add("M1", move |v| Ok(g.m1(v)));
            b.add("M2", move |v| Ok(g.m2(v)));
            for k in 1..=n {
                b.add(format!("R_{k}(theta_a, phi_ab)"), move |v| Ok(rk(v, &galilei_theta(v, 0, cmu), &v.hess(0), k)));
            }
            for k in 1..=n {
                b.add(format!("S_{k}(phi_ab)"), move |v| Ok(sk(v, &v.hess(0), k)));
            }
            name = "AG_I basis, mu != 0";
            anchor = "Galilei invariants M1, M2, R_k(theta_a, phi_ab), S_k(phi_ab)";
            expected = 2 * n + 2;
        }
        AlgebraName::Ag1I => {
            b.add("M2/M1^2", move |v| Ok(g.m2(v) / g.m1(v).powi(2)));
            for k in 1..=n {
                b.add(format!("R_{k}/M1^{}", k + 2), move |v| {
                    Ok(rk(v, &galilei_theta(v, 0, cmu), &v.hess(0), k) / g.m1(v).powi(k as i32 + 2))
                });
            }
            for k in 1..=n {
                b.add(format!("S_{k}/M1^{k}"), move |v| Ok(sk(v, &v.hess(0), k) / g.m1(v).powi(k as i32)));
            }
            name = "AG1_I basis, mu != 0";
            anchor = "Galilei invariants with dilation: M2/M1^2, R_k/M1^(2+k), S_k/M1^k";
            expected = 2 * n + 1;
        }
        _ => {
            let gamma = if reading == Reading::Corrected { 0.5 / n as f64 } else { 1.0 / n as f64 };
            b.add("N2/N1^2", move |v| Ok(g.n2(v, gamma) / g.n1(v).powi(2)));
            for k in 1..=n {
                b.add(format!("Rhat_{k}/N1^{}", k + 2), move |v| {
                    let h = v.hess(0);
                    Ok(r_hat(v, &galilei_theta(v, 0, cmu), &h, k, n, reading)? / g.n1(v).powi(k as i32 + 2))
                });
            }
            for k in 2..=n {
                b.add(format!("Shat_{k}/N1^{k}"), move |v| {
                    Ok(s_hat(v, &v.hess(0), k, n, reading) / g.n1(v).powi(k as i32))
                });
            }
            name = "AG2_I basis, mu != 0";
            anchor = "projective Galilei invariants N2/N1^2, Rhat_k/N1^(2+k), Shat_k/N1^k";
            expected = 2 * n;
        }
    }
    finish(spec, format!("{name} ({reading})"), anchor, b, expected)
}

fn galilei_real_zero(spec: &AlgebraSpec) -> BasisFamily {
    let geom = spec.geometry();
    let n = spec.n;
    let lambda = spec.effective_lambda().unwrap_or(-(n as f64) / 2.0);
    let mut b = Builder::new(geom, jet_deps(spec.shape(), &[0], false, false));
    fn m1(v: &JetView<'_>) -> Result<D, EvalError> {
        let th = implicit_theta(v, 0)?;
        Ok(v.ut(0) - v.dot(&v.grad(0), &th))
    }
    fn m2(v: &JetView<'_>) -> Result<D, EvalError> {
        let th = implicit_theta(v, 0)?;
        Ok(v.utt(0) - v.dot(&v.uat(0), &th))
    }
    let (name, anchor, expected);
    match spec.name {
        AlgebraName::AgI => {
            b.add("M1", m1);
            b.add("M2", m2);
            for k in 1..=n {
                b.add(format!("R_{k}(phi_a, phi_ab)"), move |v| Ok(rk(v, &v.grad(0), &v.hess(0), k)));
            }
            for k in 1..=n {
                b.add(format!("S_{k}(phi_ab)"), move |v| Ok(sk(v, &v.hess(0), k)));
            }
            name = "AG_I basis, mu = 0";
            expected = 2 * n + 2;
        }
        AlgebraName::Ag1I => {
            b.add("M1^2/M2", |v| Ok(m1(v)?.powi(2) / m2(v)?));
            for k in 1..=n {
                b.add(format!("R_{k}/M1^{k}"), move |v| Ok(rk(v, &v.grad(0), &v.hess(0), k) / m1(v)?.powi(k as i32)));
            }
            for k in 1..=n {
                b.add(format!("S_{k}/M1^{k}"), move |v| Ok(sk(v, &v.hess(0), k) / m1(v)?.powi(k as i32)));
            }
            name = "AG1_I basis, mu = 0";
            expected = 2 * n + 1;
        }
        _ => {
            let big_m = move |v: &JetView<'_>| -> Result<D, EvalError> {
                let g = v.grad(0);
                let y = solve(&v.hess(0), &g).ok_or_else(|| EvalError::Singular("degenerate Hessian".into()))?;
                Ok(m1(v)?.powi(2) + m2(v)? * (D::from_f64(lambda) + dot(&g, &y)))
            };
            for k in 1..=n {
                b.add(format!("R_{k}/M^({k}/2)"), move |v| {
                    Ok(rk(v, &v.grad(0), &v.hess(0), k) / big_m(v)?.powf(k as f64 / 2.0))
                });
            }
            for k in 1..=n {
                b.add(format!("S_{k}/M^({k}/2)"), move |v| Ok(sk(v, &v.hess(0), k) / big_m(v)?.powf(k as f64 / 2.0)));
            }
            name = "AG2_I basis, mu = 0";
            expected = 2 * n;
        }
    }
    anchor = "Galilei invariants for mu = 0 with theta from phi_ab theta_b = phi_at";
    finish(spec, name.to_string(), anchor, b, expected)
}

/// Complex-field Galilei families for `m ≠ 0` (slot 0 is `φ`, slot 1 is `φ*`).
fn galilei_complex(spec: &AlgebraSpec, reading: Reading) -> BasisFamily {
    let geom = spec.geometry();
    let n = spec.n;
    let nn = n as f64;
    let mass = spec.mass.unwrap_or(1.0);
    let i = C64::new(0.0, 1.0);
    let lambda = spec.effective_lambda().unwrap_or(0.0);
    let corrected = reading == Reading::Corrected;
    let g = Gal { r: 0, mu: i * mass, n: nn };
    let gs = Gal { r: 1, mu: -i * mass, n: nn };
    // vector coupling: printed −im for φ
    let th_mu = if corrected { i * mass } else { -i * mass };
    let theta_p = move |v: &JetView<'_>| galilei_theta(v, 0, th_mu);
    let theta_s = move |v: &JetView<'_>| galilei_theta(v, 1, th_mu.conj());
    let r3 = |v: &JetView<'_>| -> Vec<D> { v.grad(0).iter().zip(v.grad(1)).map(|(&a, b)| a + b).collect() };
    let sum = |v: &JetView<'_>| v.u(0) + v.u(1);
    let mut b = Builder::new(geom, jet_deps(spec.shape(), &[0, 1], false, true));
    let (name, anchor, expected);
    match spec.name {
        AlgebraName::AgII => {
            b.add("phi+phi*", move |v| Ok(sum(v)));
            b.add("M1", move |v| Ok(g.m1(v)));
            b.add("M1*", move |v| Ok(gs.m1(v)));
            b.add("M2", move |v| Ok(g.m2(v)));
            b.add("M2*", move |v| Ok(gs.m2(v)));
            for k in 1..=n {
                for j in 0..=k {
                    b.add(format!("S_{j},{k}(phi, phi*)"), move |v| Ok(sjk(v, &v.hess(0), &v.hess(1), j, k)));
                }
            }
            for k in 1..=n {
                b.add(format!("R1_{k}"), move |v| Ok(rk(v, &theta_p(v), &v.hess(0), k)));
                b.add(format!("R2_{k}"), move |v| Ok(rk(v, &theta_s(v), &v.hess(0), k)));
                b.add(format!("R3_{k}"), move |v| Ok(rk(v, &r3(v), &v.hess(0), k)));
            }
            name = "AG_II basis, m != 0";
            anchor = "complex Galilei invariants phi+phi*, M1, M2, S_jk, R_k^l";
            expected = 5 + n * (n + 3) / 2 + 3 * n;
        }
        AlgebraName::Ag1II => {
            b.add("M1*/M1", move |v| Ok(gs.m1(v) / g.m1(v)));
            b.add("M2/M1^2", move |v| Ok(g.m2(v) / g.m1(v).powi(2)));
            b.add("M2*/M1^2", move |v| Ok(gs.m2(v) / g.m1(v).powi(2)));
            for k in 1..=n {
                b.add(format!("R1_{k}/M1^{}", k + 2), move |v| {
                    Ok(rk(v, &theta_p(v), &v.hess(0), k) / g.m1(v).powi(k as i32 + 2))
                });
                b.add(format!("R2_{k}/M1^{}", k + 2), move |v| {
                    Ok(rk(v, &theta_s(v), &v.hess(0), k) / g.m1(v).powi(k as i32 + 2))
                });
                b.add(format!("R3_{k}/M1^{k}"), move |v| Ok(rk(v, &r3(v), &v.hess(0), k) / g.m1(v).powi(k as i32)));
            }
            for k in 1..=n {
                for j in 0..=k {
                    b.add(format!("S_{j},{k}/M1^{k}"), move |v| {
                        Ok(sjk(v, &v.hess(0), &v.hess(1), j, k) / g.m1(v).powi(k as i32))
                    });
                }
            }
            if lambda == 0.0 {
                b.add("phi+phi*", move |v| Ok(sum(v)));
            } else {
                let c = if corrected { 1.0 / lambda } else { 2.0 / lambda };
                b.add(format!("M1 exp({c:.4}(phi+phi*))"), move |v| Ok(g.m1(v) * sum(v).scale(c).exp()));
            }
            name = "AG1_II basis, m != 0";
            anchor = "complex Galilei invariants with dilation";
            expected = 4 + 3 * n + n * (n + 3) / 2;
        }
        _ => {
            let gamma = if corrected { 0.5 / nn } else { 1.0 / nn };
            let c = if corrected { -2.0 / nn } else { -4.0 / nn };
            b.add(format!("N1 exp({c:.4}(phi+phi*))"), move |v| Ok(g.n1(v) * sum(v).scale(c).exp()));
            b.add("N1/N1*", move |v| Ok(g.n1(v) / gs.n1(v)));
            if corrected {
                b.add("N2/N1^2", move |v| Ok(g.n2(v, gamma) / g.n1(v).powi(2)));
                b.add("N2*/N1^2", move |v| Ok(gs.n2(v, gamma) / g.n1(v).powi(2)));
            } else {
                b.add("N2/N1*", move |v| Ok(g.n2(v, gamma) / gs.n1(v)));
                b.add("N2*/N1*", move |v| Ok(gs.n2(v, gamma) / gs.n1(v)));
            }
            for k in 1..=n {
                b.add(format!("Rhat1_{k}/N1^{}", k + 2), move |v| {
                    let rd = if corrected { Reading::Corrected } else { Reading::Binomial };
                    Ok(r_hat(v, &theta_p(v), &v.hess(0), k, n, rd)? / g.n1(v).powi(k as i32 + 2))
                });
                b.add(format!("Rhat2_{k}/N1^{}", k + 2), move |v| {
                    let rd = if corrected { Reading::Corrected } else { Reading::Binomial };
                    Ok(r_hat(v, &theta_s(v), &v.hess(0), k, n, rd)? / g.n1(v).powi(k as i32 + 2))
                });
                b.add(format!("Rhat3_{k}/N1^{k}"), move |v| {
                    let rd = if corrected { Reading::Corrected } else { Reading::Binomial };
                    Ok(r_hat(v, &r3(v), &v.hess(0), k, n, rd)? / g.n1(v).powi(k as i32))
                });
            }
            for k in 1..=n {
                for j in 0..=k {
                    if corrected && k == 1 {
                        continue;
                    }
                    b.add(format!("Shat_{j},{k}/N1^{k}"), move |v| {
                        Ok(s_hat_jk(v, j, k, n, corrected) / g.n1(v).powi(k as i32))
                    });
                }
            }
            if corrected {
                b.add("(phi_aa+phi*_aa)/N1", move |v| Ok((v.trace(&v.hess(0)) + v.trace(&v.hess(1))) / g.n1(v)));
            }
            name = "AG2_II basis, m != 0";
            anchor = "projective complex Galilei invariants N1, N2, Rhat_k^l, Shat_jk";
            expected = 4 + 3 * n + n * (n + 3) / 2 - 1;
        }
    }
    finish(spec, format!("{name} ({reading})"), anchor, b, expected)
}

/// Complex `Ŝ_jk` over `U = φ_ab`, `V = φ*_ab`.
fn s_hat_jk(v: &JetView<'_>, j: usize, k: usize, n: usize, corrected: bool) -> D {
    let (u, w) = (v.hess(0), v.hess(1));
    let metric = v.metric();
    if corrected {
        return sjk(v, &shifted(&u, &metric), &shifted(&w, &metric), j, k);
    }
    let (t, ts) = (v.trace(&u), v.trace(&w));
    let mut s = D::zero();
    for l in 0..=k {
        for r in 0..=j.min(l) {
            let c = (-(n as f64)).powi(l as i32) * binom(j as i64, r as i64) * binom(k as i64, l as i64 + 1 - r as i64);
            if c == 0.0 {
                continue;
            }
            let e1 = j as i32 - r as i32;
            let e2 = k as i32 - l as i32 - j as i32 + r as i32;
            s = s + (sjk(v, &u, &w, r, l) * t.powi(e1) * ts.powi(e2)).scale(c);
        }
    }
    s + (t.powi(j as i32) * ts.powi(k as i32 - j as i32 - 1)).scale(k as f64)
}

/// Massless complex Galilei family (λ-branches).
fn galilei_complex_zero(spec: &AlgebraSpec, reading: Reading) -> BasisFamily {
    let geom = spec.geometry();
    let n = spec.n;
    let lambda = spec.effective_lambda().unwrap_or(0.0);
    let mut b = Builder::new(geom, jet_deps(spec.shape(), &[0, 1], false, true));
    let sing = || EvalError::Singular("degenerate Hessian".into());
    // θ_a = r_ab φ_bt for slot s
    let th = move |v: &JetView<'_>, s: usize| implicit_theta(v, s);
    let m1 = move |v: &JetView<'_>, s: usize| -> Result<D, EvalError> { Ok(v.ut(s) - v.dot(&v.grad(s), &th(v, s)?)) };
    let m2 = move |v: &JetView<'_>, s: usize| -> Result<D, EvalError> { Ok(v.utt(s) - v.dot(&v.uat(s), &th(v, s)?)) };
    let q = move |v: &JetView<'_>, s: usize, w: usize| -> Result<D, EvalError> {
        // φ^w_a φ^w_b r^s_ab
        let gw = v.grad(w);
        let y = solve(&v.hess(s), &gw).ok_or_else(sing)?;
        Ok(dot(&gw, &y))
    };
    let big_n1 = move |v: &JetView<'_>| -> Result<D, EvalError> {
        Ok(m1(v, 0)?.powi(2) + m2(v, 0)? * (D::from_f64(lambda) + q(v, 0, 0)?))
    };
    let big_n1s = move |v: &JetView<'_>| -> Result<D, EvalError> {
        Ok(m1(v, 1)?.powi(2) + m2(v, 1)? * (D::from_f64(lambda) + q(v, 1, 1)?))
    };
    let big_n2 = move |v: &JetView<'_>| -> Result<D, EvalError> { Ok(m1(v, 0)? * q(v, 1, 1)? - m1(v, 1)? * q(v, 0, 0)?) };
    let big_n3 = move |v: &JetView<'_>| -> Result<D, EvalError> {
        let (g, h, at) = (v.grad(0), v.hess(0), v.uat(0));
        let l = D::from_f64(lambda);
        let a: Mat<D> = (0..g.len())
            .map(|x| (0..g.len()).map(|y| l * h[x][y] + g[x] * g[y]).collect())
            .collect();
        let rhs: Vec<D> = g.iter().zip(&at).map(|(&gb, &atb)| gb * v.ut(0) + l * atb).collect();
        let tau = solve(&a, &rhs).ok_or_else(sing)?;
        let diff: Vec<D> = g.iter().zip(v.grad(1)).map(|(&x, y)| x - y).collect();
        Ok(v.ut(0) - v.ut(1) - v.dot(&tau, &diff))
    };
    let sum = |v: &JetView<'_>| v.u(0) + v.u(1);
    let corrected = reading == Reading::Corrected;
    let vec_l = move |v: &JetView<'_>, l: usize| -> Result<Vec<D>, EvalError> {
        Ok(match l {
            1 => v.grad(0),
            2 => v.grad(1),
            3 if !corrected => th(v, 0)?.iter().zip(th(v, 1)?).map(|(&a, b)| a - b).collect(),
            _ if corrected => {
                // θ − θ* + M1 (rφ − r*φ*) / (λ + φ r φ): the A-shift of θ − θ* cancels
                let (g, gs) = (v.grad(0), v.grad(1));
                let a = solve(&v.hess(0), &g).ok_or_else(sing)?;
                let c = solve(&v.hess(1), &gs).ok_or_else(sing)?;
                let s = m1(v, 0)? / (D::from_f64(lambda) + dot(&g, &a));
                let (t0, t1) = (th(v, 0)?, th(v, 1)?);
                (0..g.len()).map(|x| t0[x] - t1[x] + s * (a[x] - c[x])).collect()
            }
            _ => {
                // ρ_a = M1 (r φ* − r* φ)_a − φ_a (θ_a − θ*_a)
                let (g, gs) = (v.grad(0), v.grad(1));
                let r = inverse(&v.hess(0)).ok_or_else(sing)?;
                let rs = inverse(&v.hess(1)).ok_or_else(sing)?;
                let (a, c) = (mat_vec(&r, &gs), mat_vec(&rs, &g));
                let (t0, t1) = (th(v, 0)?, th(v, 1)?);
                let mm = m1(v, 0)?;
                (0..g.len()).map(|x| mm * (a[x] - c[x]) - g[x] * (t0[x] - t1[x])).collect()
            }
        })
    };
    if lambda == 0.0 {
        b.add("phi+phi*", move |v| Ok(sum(v)));
        if corrected {
            b.add("N1/N2^2", move |v| Ok(big_n1(v)? / big_n2(v)?.powi(2)));
            b.add("N1*/N2^2", move |v| Ok(big_n1s(v)? / big_n2(v)?.powi(2)));
        } else {
            b.add("N1^2/N2^2", move |v| Ok(big_n1(v)?.powi(2) / big_n2(v)?.powi(2)));
            b.add("N1*^2/N2", move |v| Ok(big_n1s(v)?.powi(2) / big_n2(v)?));
        }
        for k in 1..=n {
            for j in 0..=k {
                b.add(format!("S_{j},{k}^2/N1^{k}"), move |v| {
                    Ok(sjk(v, &v.hess(0), &v.hess(1), j, k).powi(2) / big_n1(v)?.powi(k as i32))
                });
            }
        }
        for l in [1usize, 2, 4] {
            for k in 1..=n {
                let e = if corrected { k as i32 } else { k as i32 + 1 };
                b.add(format!("(R{l}_{k})^2 N1^-{e}"), move |v| {
                    Ok(rk(v, &vec_l(v, l)?, &v.hess(0), k).powi(2) * big_n1(v)?.powi(-e))
                });
            }
        }
    } else {
        let (c1, c3) = if reading == Reading::Corrected { (2.0 / lambda, 1.0 / lambda) } else { (4.0 / lambda, 3.0 / lambda) };
        b.add(format!("N1 exp({c1:.4}(phi+phi*))"), move |v| Ok(big_n1(v)? * sum(v).scale(c1).exp()));
        b.add("N1*/N1", move |v| Ok(big_n1s(v)? / big_n1(v)?));
        b.add(format!("N3 exp({c3:.4}(phi+phi*))"), move |v| Ok(big_n3(v)? * sum(v).scale(c3).exp()));
        for l in [1usize, 2, 3] {
            for k in 1..=n {
                b.add(format!("(R{l}_{k})^2/N1^{k}"), move |v| {
                    Ok(rk(v, &vec_l(v, l)?, &v.hess(0), k).powi(2) / big_n1(v)?.powi(k as i32))
                });
            }
        }
        for k in 1..=n {
            for j in 0..=k {
                b.add(format!("S_{j},{k}^2/N1^{k}"), move |v| {
                    Ok(sjk(v, &v.hess(0), &v.hess(1), j, k).powi(2) / big_n1(v)?.powi(k as i32))
                });
            }
        }
    }
    let branch = if lambda == 0.0 { "lambda = 0" } else { "lambda != 0" };
    let expected = 2 + 2 * (2 + 2 * n + n * (n + 1) / 2) - (n * (n - 1) / 2 + n + 3);
    finish(
        spec,
        format!("AG2_II basis, m = 0, {branch}"),
        "massless complex Galilei invariants",
        b,
        expected,
    )
}

/// Rotation invariants of two vectors and two symmetric tensors:
/// `R_k(u_a, u_ab)`, `R_k(v_a, v_ab)`, `S_jk(u_ab, v_ab)`.
pub fn vectors_and_tensors(n: usize) -> Result<BasisFamily, BasisError> {
    let spec = AlgebraSpec::new(AlgebraName::AO, n).fields(2);
    spec.validate()?;
    let geom = spec.geometry();
    let mut deps = jet_deps(spec.shape(), &[0, 1], false, false);
    deps.sort();
    let mut b = Builder::new(geom, deps);
    for r in 0..2 {
        for k in 1..=n {
            b.add(format!("R_{k}(u{0}_a, u{0}_ab)", r + 1), move |v| Ok(rk(v, &v.grad(r), &v.hess(r), k)));
        }
    }
    for k in 1..=n {
        for j in 0..=k {
            b.add(format!("S_{j},{k}(u1, u2)"), move |v| Ok(sjk(v, &v.hess(0), &v.hess(1), j, k)));
        }
    }
    Ok(finish(
        &spec,
        "AO(n) two vectors and two tensors".into(),
        "rotation invariants of (u_a, u_ab, v_a, v_ab)",
        b,
        n * (n + 7) / 2,
    ))
}

/// `tr U^j V^{k−j}` for `j = 0..k`, `k = 1..n`, over the Hessians of two fields.
pub fn trace_products(n: usize) -> Result<BasisFamily, BasisError> {
    let spec = AlgebraSpec::new(AlgebraName::AO, n).fields(2);
    spec.validate()?;
    let shape = spec.shape();
    let mut deps = Vec::new();
    for r in 0..2 {
        for i in 0..n {
            for j in i..n {
                deps.push(JetCoordinateId::D2 { field: r, i, j });
            }
        }
    }
    let _ = shape;
    let mut b = Builder::new(spec.geometry(), deps);
    for k in 1..=n {
        for j in 0..=k {
            b.add(format!("tr U^{j} V^{}", k - j), move |v| Ok(sjk(v, &v.hess(0), &v.hess(1), j, k)));
        }
    }
    Ok(finish(
        &spec,
        "trace products of two symmetric tensors".into(),
        "tr U^j V^(k-j)",
        b,
        n * (n + 3) / 2,
    ))
}

/// Listing entry for `list bases`.
pub struct BasisListing {
    pub algebra: AlgebraName,
    pub title: &'static str,
    pub params: &'static str,
}

pub fn basis_listing() -> Vec<BasisListing> {
    use AlgebraName::*;
    let e = |algebra, title, params| BasisListing { algebra, title, params };
    vec![
        e(AO, "AO(n) rotation basis with coordinates x_a", "n, m"),
        e(AE, "AE(n) Euclid basis, m fields", "n, m"),
        e(AE1, "AE1(n) extended Euclid basis, branches lambda = 0 / lambda != 0", "n, m, lambda"),
        e(AC, "AC(n) conformal basis from theta_ab (lambda != 0) or w_ab (lambda = 0)", "n, m, lambda"),
        e(AP, "AP(1,n) m-field basis", "n, m"),
        e(APtilde, "extended AP(1,n) basis, branches lambda = 0 / lambda != 0", "n, m, lambda"),
        e(AC1n, "AC(1,n) conformal basis, branches lambda = 0 / lambda != 0", "n, m, lambda"),
        e(AgI, "AG_I Galilei basis (mu != 0: M1, M2, R_k, S_k; mu = 0: implicit theta)", "n, mu"),
        e(Ag1I, "AG1_I Galilei basis with dilation", "n, mu, lambda"),
        e(Ag2I, "AG2_I projective Galilei basis (readings printed | binomial | corrected)", "n, mu"),
        e(AgII, "AG_II complex Galilei basis, m != 0", "n, mass"),
        e(Ag1II, "AG1_II complex Galilei basis with dilation, m != 0", "n, mass, lambda"),
        e(Ag2II, "AG2_II projective complex Galilei basis (m != 0, or m = 0 with lambda branches)", "n, mass, lambda"),
    ]
}
