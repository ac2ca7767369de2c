use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::coef::{ccst, cst, u, x, Coef};
use super::{AlgebraError, VectorField};
use crate::jetspace::{FieldKind, Geometry, JetShape};
use crate::C64;

/// Every algebra family the catalog knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgebraName {
    AO,
    AE,
    AE1,
    AC,
    AP,
    APtilde,
    AC1n,
    #[serde(rename = "AG_I")]
    AgI,
    #[serde(rename = "AG1_I")]
    Ag1I,
    #[serde(rename = "AG2_I")]
    Ag2I,
    #[serde(rename = "AG_II")]
    AgII,
    #[serde(rename = "AG1_II")]
    Ag1II,
    #[serde(rename = "AG2_II")]
    Ag2II,
    #[serde(rename = "AP_inf")]
    ApInf,
    #[serde(rename = "AP_BornInfeld")]
    ApBornInfeld,
}

impl AlgebraName {
    pub const ALL: [AlgebraName; 15] = [
        AlgebraName::AO,
        AlgebraName::AE,
        AlgebraName::AE1,
        AlgebraName::AC,
        AlgebraName::AP,
        AlgebraName::APtilde,
        AlgebraName::AC1n,
        AlgebraName::AgI,
        AlgebraName::Ag1I,
        AlgebraName::Ag2I,
        AlgebraName::AgII,
        AlgebraName::Ag1II,
        AlgebraName::Ag2II,
        AlgebraName::ApInf,
        AlgebraName::ApBornInfeld,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgebraName::AO => "AO",
            AlgebraName::AE => "AE",
            AlgebraName::AE1 => "AE1",
            AlgebraName::AC => "AC",
            AlgebraName::AP => "AP",
            AlgebraName::APtilde => "APtilde",
            AlgebraName::AC1n => "AC1n",
            AlgebraName::AgI => "AG_I",
            AlgebraName::Ag1I => "AG1_I",
            AlgebraName::Ag2I => "AG2_I",
            AlgebraName::AgII => "AG_II",
            AlgebraName::Ag1II => "AG1_II",
            AlgebraName::Ag2II => "AG2_II",
            AlgebraName::ApInf => "AP_inf",
            AlgebraName::ApBornInfeld => "AP_BornInfeld",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            AlgebraName::AO => "rotations J_ab",
            AlgebraName::AE => "Euclid: translations, rotations",
            AlgebraName::AE1 => "extended Euclid: AE + dilation D (lambda)",
            AlgebraName::AC => "conformal: AE1 + K_a",
            AlgebraName::AP => "Poincare AP(1,n): p_mu, J_mu_nu",
            AlgebraName::APtilde => "extended Poincare: AP + D (lambda)",
            AlgebraName::AC1n => "conformal AC(1,n): APtilde + K_mu",
            AlgebraName::AgI => "Galilei, real field: d_t, d_a, J_ab, G_a, u d_u (mu)",
            AlgebraName::Ag1I => "AG_I + D (lambda)",
            AlgebraName::Ag2I => "AG1_I + A, lambda = -n/2",
            AlgebraName::AgII => "Galilei, complex field: p_0, p_a, J, J_ab, G_a (mass)",
            AlgebraName::Ag1II => "AG_II + D (lambda)",
            AlgebraName::Ag2II => "AG1_II + A, lambda = -n/2",
            AlgebraName::ApInf => "infinite-dimensional eikonal algebra (b(u), a(u), eta(u), d(u))",
            AlgebraName::ApBornInfeld => "AP(1,n+1) on (x_0..x_n, u): translations and J_AB",
        }
    }

    pub fn is_galilei(self) -> bool {
        matches!(
            self,
            AlgebraName::AgI
                | AlgebraName::Ag1I
                | AlgebraName::Ag2I
                | AlgebraName::AgII
                | AlgebraName::Ag1II
                | AlgebraName::Ag2II
        )
    }

    pub fn is_complex(self) -> bool {
        matches!(self, AlgebraName::AgII | AlgebraName::Ag1II | AlgebraName::Ag2II)
    }

    fn needs_lambda(self) -> bool {
        matches!(
            self,
            AlgebraName::AE1
                | AlgebraName::AC
                | AlgebraName::APtilde
                | AlgebraName::AC1n
                | AlgebraName::Ag1I
                | AlgebraName::Ag1II
        )
    }

    fn forces_lambda(self) -> bool {
        matches!(self, AlgebraName::Ag2I | AlgebraName::Ag2II)
    }
}

impl fmt::Display for AlgebraName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgebraName {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        AlgebraName::ALL
            .into_iter()
            .find(|a| a.as_str().to_ascii_lowercase().replace('_', "") == key)
            .ok_or_else(|| AlgebraError::UnknownAlgebra(s.to_string()))
    }
}

/// Dependent-variable chart for scaling generators: `u ∂_u` (linear) or,
/// after `u = exp φ`, `∂_φ` (log).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    #[default]
    Linear,
    Log,
}

/// Coefficient functions of the infinite-dimensional eikonal algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct ApInfFunctions {
    /// `b^{μν}(u)` used for every pair `μ < ν` (skew-extended).
    pub b: Coef,
    /// `a^μ(u)` used for every `μ`.
    pub a: Coef,
    pub eta: Coef,
    pub d: Option<Coef>,
}

/// How to instantiate the infinite-dimensional algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct ApInfConfig {
    pub seed: u64,
    /// Degree of the sampled polynomials in `u`.
    pub degree: usize,
    /// Adds `d(u) x_μ ∂_μ` generators.
    pub with_dilation: bool,
    /// User-supplied functions; replaces sampling when present.
    pub functions: Option<ApInfFunctions>,
}

impl Default for ApInfConfig {
    fn default() -> Self {
        ApInfConfig {
            seed: 0,
            degree: 2,
            with_dilation: false,
            functions: None,
        }
    }
}

/// A named algebra with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraSpec {
    pub name: AlgebraName,
    pub n: usize,
    pub m: usize,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub mass: Option<f64>,
    pub chart: Chart,
    pub apinf: Option<ApInfConfig>,
}

impl AlgebraSpec {
    pub fn new(name: AlgebraName, n: usize) -> Self {
        AlgebraSpec {
            name,
            n,
            m: 1,
            lambda: None,
            mu: None,
            mass: None,
            chart: if name.is_galilei() { Chart::Log } else { Chart::Linear },
            apinf: None,
        }
    }

    pub fn fields(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn lambda(mut self, l: f64) -> Self {
        self.lambda = Some(l);
        self
    }

    pub fn mu(mut self, mu: f64) -> Self {
        self.mu = Some(mu);
        self
    }

    pub fn mass(mut self, mass: f64) -> Self {
        self.mass = Some(mass);
        self
    }

    pub fn chart(mut self, chart: Chart) -> Self {
        self.chart = chart;
        self
    }

    pub fn apinf(mut self, cfg: ApInfConfig) -> Self {
        self.apinf = Some(cfg);
        self
    }

    pub fn field_kind(&self) -> FieldKind {
        if self.name.is_complex() {
            FieldKind::Complex
        } else {
            FieldKind::Real
        }
    }

    pub fn geometry(&self) -> Geometry {
        match self.name {
            AlgebraName::AO | AlgebraName::AE | AlgebraName::AE1 | AlgebraName::AC => {
                Geometry::Euclidean { n: self.n }
            }
            AlgebraName::AP
            | AlgebraName::APtilde
            | AlgebraName::AC1n
            | AlgebraName::ApInf
            | AlgebraName::ApBornInfeld => Geometry::Minkowski { n: self.n },
            _ => Geometry::Galilean { n: self.n },
        }
    }

    pub fn shape(&self) -> JetShape {
        JetShape {
            n_base: self.geometry().n_base(),
            n_slots: self.m * self.field_kind().slots_per_field(),
        }
    }

    /// λ after applying the family's rule (`-n/2` for AG₂).
    pub fn effective_lambda(&self) -> Option<f64> {
        if self.forces_lambda() {
            Some(-(self.n as f64) / 2.0)
        } else if self.name.forces_lambda() {
            Some(self.lambda.unwrap_or(-(self.n as f64) / 2.0))
        } else {
            self.lambda
        }
    }

    /// AG₂ ties λ to `-n/2` only when μ (or the mass) is nonzero.
    fn forces_lambda(&self) -> bool {
        let nonzero = |v: Option<f64>| v.is_some_and(|v| v != 0.0);
        match self.name {
            AlgebraName::Ag2I => nonzero(self.mu),
            AlgebraName::Ag2II => nonzero(self.mass),
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<(), AlgebraError> {
        let bad = |msg: String| Err(AlgebraError::InvalidParams(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if self.name.needs_lambda() && self.lambda.is_none() {
            return bad(format!("{} requires lambda", self.name));
        }
        if self.forces_lambda() {
            let forced = -(self.n as f64) / 2.0;
            if let Some(l) = self.lambda {
                if (l - forced).abs() > 1e-12 {
                    return bad(format!("{} forces lambda = -n/2 = {forced}, got {l}", self.name));
                }
            }
        }
        if matches!(self.name, AlgebraName::AgI | AlgebraName::Ag1I | AlgebraName::Ag2I)
            && self.mu.is_none()
        {
            return bad(format!("{} requires mu", self.name));
        }
        if self.name.is_complex() && self.mass.is_none() {
            return bad(format!("{} requires mass", self.name));
        }
        if self.name == AlgebraName::ApBornInfeld && self.m != 1 {
            return bad("AP_BornInfeld acts on a single field".into());
        }
        if matches!(self.name, AlgebraName::ApInf | AlgebraName::ApBornInfeld)
            && self.chart == Chart::Log
        {
            return bad(format!("{} is only available in the linear chart", self.name));
        }
        if self.name == AlgebraName::ApInf && self.m != 1 {
            return bad("AP_inf acts on a single field".into());
        }
        Ok(())
    }
}

/// Builds generators over a fixed `(x, u)`-space.
struct Builder<'a> {
    spec: &'a AlgebraSpec,
    n_base: usize,
    n_slots: usize,
}

impl Builder<'_> {
    fn zero(&self, label: impl Into<String>) -> VectorField {
        VectorField::zero(label, self.n_base, self.n_slots)
    }

    /// η for a scaling generator `Σ_r c_r u^r ∂_{u^r}` in the current chart.
    fn scaling(&self, c: impl Fn(usize) -> Coef) -> Vec<Coef> {
        (0..self.n_slots)
            .map(|r| match self.spec.chart {
                Chart::Linear => c(r) * u(r),
                Chart::Log => c(r),
            })
            .collect()
    }

    fn translation(&self, label: String, i: usize, sign: f64) -> VectorField {
        let mut f = self.zero(label);
        f.xi[i] = cst(sign);
        f
    }

    /// `x_a p_b − x_b p_a` with `p_c = s_c ∂_c`.
    fn rotation(&self, label: String, a: usize, b: usize, sa: f64, sb: f64) -> VectorField {
        let mut f = self.zero(label);
        f.xi[b] = cst(sb) * x(a);
        f.xi[a] = cst(-sa) * x(b);
        f
    }
}

fn sub(i: usize) -> String {
    i.to_string()
}

/// The basis of the named algebra.
pub fn catalog(spec: &AlgebraSpec) -> Result<Vec<VectorField>, AlgebraError> {
    spec.validate()?;
    let shape = spec.shape();
    let b = Builder {
        spec,
        n_base: shape.n_base,
        n_slots: shape.n_slots,
    };
    let n = spec.n;
    let lambda = spec.effective_lambda().unwrap_or(0.0);
    let mut out = Vec::new();
    match spec.name {
        AlgebraName::AO | AlgebraName::AE | AlgebraName::AE1 | AlgebraName::AC => {
            if spec.name != AlgebraName::AO {
                for a in 0..n {
                    out.push(b.translation(format!("∂_{}", sub(a + 1)), a, 1.0));
                }
            }
            for a in 0..n {
                for c in a + 1..n {
                    out.push(b.rotation(format!("J_{}{}", a + 1, c + 1), a, c, 1.0, 1.0));
                }
            }
            if matches!(spec.name, AlgebraName::AE1 | AlgebraName::AC) {
                out.push(dilation(&b, "D", 0..n, lambda, None));
            }
            if spec.name == AlgebraName::AC {
                for a in 0..n {
                    out.push(special_conformal(&b, a, lambda, |_| 1.0, format!("K_{}", a + 1)));
                }
            }
        }
        AlgebraName::AP | AlgebraName::APtilde | AlgebraName::AC1n => {
            let g = spec.geometry().metric();
            for mu in 0..=n {
                out.push(b.translation(format!("p_{mu}"), mu, g.weight(mu)));
            }
            for mu in 0..=n {
                for nu in mu + 1..=n {
                    out.push(b.rotation(
                        format!("J_{mu}{nu}"),
                        mu,
                        nu,
                        g.weight(mu),
                        g.weight(nu),
                    ));
                }
            }
            if spec.name != AlgebraName::AP {
                out.push(dilation(&b, "D", 0..n + 1, lambda, None));
            }
            if spec.name == AlgebraName::AC1n {
                for mu in 0..=n {
                    out.push(special_conformal(&b, mu, lambda, |i| g.weight(i), format!("K_{mu}")));
                }
            }
        }
        AlgebraName::ApBornInfeld => out.extend(born_infeld(&b, n)),
        AlgebraName::ApInf => out.extend(ap_inf(&b, n, spec.apinf.clone().unwrap_or_default())),
        AlgebraName::AgI | AlgebraName::Ag1I | AlgebraName::Ag2I => {
            let mu = spec.mu.unwrap_or(0.0);
            out.extend(galilei_real(&b, n, mu, lambda, spec.name));
        }
        AlgebraName::AgII | AlgebraName::Ag1II | AlgebraName::Ag2II => {
            let mass = spec.mass.unwrap_or(0.0);
            out.extend(galilei_complex(&b, n, mass, lambda, spec.name));
        }
    }
    Ok(out)
}

/// `x_i ∂_i` over `indices` (with optional weight on index 0) plus `λ u ∂_u`.
fn dilation(
    b: &Builder<'_>,
    label: &str,
    indices: std::ops::Range<usize>,
    lambda: f64,
    time_weight: Option<f64>,
) -> VectorField {
    let mut f = b.zero(label);
    for i in indices {
        f.xi[i] = x(i);
    }
    if let Some(w) = time_weight {
        f.xi[0] = cst(w) * x(0);
    }
    f.eta = b.scaling(|_| cst(lambda));
    f
}

/// `2 x_a D − (x·x) p_a` with `p_a = s_a ∂_a`, the contraction taken with
/// weights `s`.
fn special_conformal(
    b: &Builder<'_>,
    a: usize,
    lambda: f64,
    s: impl Fn(usize) -> f64,
    label: String,
) -> VectorField {
    let dims = b.n_base;
    let sq = (0..dims).fold(Coef::zero(), |acc, i| acc + cst(s(i)) * x(i) * x(i));
    let mut f = b.zero(label);
    for c in 0..dims {
        let mut xi = cst(2.0) * x(a) * x(c);
        if c == a {
            xi = xi - cst(s(a)) * sq.clone();
        }
        f.xi[c] = xi;
    }
    f.eta = b.scaling(|_| cst(2.0 * lambda) * x(a));
    f
}

/// Translations and `J_AB` of AP(1, n+1) on `(x_0, …, x_n, x_{n+1} ≡ u)`.
fn born_infeld(b: &Builder<'_>, n: usize) -> Vec<VectorField> {
    let dims = n + 2;
    let weight = |i: usize| if i == 0 { 1.0 } else { -1.0 };
    let coord = |i: usize| if i <= n { x(i) } else { u(0) };
    let set = |f: &mut VectorField, i: usize, c: Coef| {
        if i <= n {
            f.xi[i] = c;
        } else {
            f.eta[0] = c;
        }
    };
    let mut out = Vec::new();
    for i in 0..dims {
        let mut f = b.zero(if i <= n { format!("p_{i}") } else { "p_u".into() });
        set(&mut f, i, cst(weight(i)));
        out.push(f);
    }
    for a in 0..dims {
        for c in a + 1..dims {
            let name = |i: usize| if i <= n { i.to_string() } else { "u".into() };
            let mut f = b.zero(format!("J_{}{}", name(a), name(c)));
            set(&mut f, c, cst(weight(c)) * coord(a));
            set(&mut f, a, cst(-weight(a)) * coord(c));
            out.push(f);
        }
    }
    out
}

fn sampled_poly(rng: &mut ChaCha8Rng, degree: usize) -> Coef {
    let coeffs: Vec<f64> = (0..=degree)
        .map(|_| {
            let m = rng.gen_range(0.5..=2.0);
            if rng.gen_bool(0.5) {
                m
            } else {
                -m
            }
        })
        .collect();
    Coef::polynomial(&coeffs, u(0))
}

/// Instances of `(b^{μν}(u) x_ν + a^μ(u)) ∂_μ + η(u) ∂_u` (and, with
/// dilation, `d(u) x_μ ∂_μ`): one generator per independent function plus
/// their sum.
fn ap_inf(b: &Builder<'_>, n: usize, cfg: ApInfConfig) -> Vec<VectorField> {
    let dims = n + 1;
    let weight = |i: usize| if i == 0 { 1.0 } else { -1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut draw = |user: Option<&Coef>| match user {
        Some(c) => c.clone(),
        None => sampled_poly(&mut rng, cfg.degree),
    };
    let funcs = cfg.functions.as_ref();
    let mut out = Vec::new();
    for mu in 0..dims {
        let mut f = b.zero(format!("a^{mu}(u)∂_{mu}"));
        f.xi[mu] = draw(funcs.map(|f| &f.a));
        out.push(f);
    }
    for mu in 0..dims {
        for nu in mu + 1..dims {
            let coef = draw(funcs.map(|f| &f.b));
            let mut f = b.zero(format!("b^{mu}{nu}(u)"));
            f.xi[mu] = coef.clone() * cst(weight(nu)) * x(nu);
            f.xi[nu] = -(coef * cst(weight(mu)) * x(mu));
            out.push(f);
        }
    }
    let mut f = b.zero("eta(u)∂_u");
    f.eta[0] = draw(funcs.map(|f| &f.eta));
    out.push(f);
    if cfg.with_dilation {
        let d = draw(funcs.and_then(|f| f.d.as_ref()));
        let mut f = b.zero("d(u)x_mu∂_mu");
        for mu in 0..dims {
            f.xi[mu] = d.clone() * x(mu);
        }
        out.push(f);
    }
    let one = C64::new(1.0, 0.0);
    let terms: Vec<(C64, &VectorField)> = out.iter().map(|f| (one, f)).collect();
    let sum = VectorField::linear_combination("X (sum)", &terms);
    out.push(sum);
    out
}

/// Galilei generators for a real field; index 0 is `t`, spatial `1..=n`.
fn galilei_real(b: &Builder<'_>, n: usize, mu: f64, lambda: f64, name: AlgebraName) -> Vec<VectorField> {
    let mut out = vec![b.translation("∂_t".into(), 0, 1.0)];
    for a in 1..=n {
        out.push(b.translation(format!("∂_{a}"), a, 1.0));
    }
    for a in 1..=n {
        for c in a + 1..=n {
            out.push(b.rotation(format!("J_{a}{c}"), a, c, 1.0, 1.0));
        }
    }
    for a in 1..=n {
        let mut f = b.zero(format!("G_{a}"));
        f.xi[a] = x(0);
        f.eta = b.scaling(|_| cst(mu) * x(a));
        out.push(f);
    }
    let mut s = b.zero("u∂_u");
    s.eta = b.scaling(|_| cst(1.0));
    out.push(s);
    if matches!(name, AlgebraName::Ag1I | AlgebraName::Ag2I) {
        out.push(dilation(b, "D", 1..n + 1, lambda, Some(2.0)));
    }
    if name == AlgebraName::Ag2I {
        // A = t²∂_t + t x_a ∂_a + (λt + μ x²/2) u∂_u
        let sq = (1..=n).fold(Coef::zero(), |acc, a| acc + x(a) * x(a));
        let mut f = b.zero("A");
        f.xi[0] = x(0) * x(0);
        for a in 1..=n {
            f.xi[a] = x(0) * x(a);
        }
        f.eta = b.scaling(|_| cst(lambda) * x(0) + cst(mu / 2.0) * sq.clone());
        out.push(f);
    }
    out
}

/// Galilei generators for a complex field acting on the `(ψ, ψ*)` slot pair.
///
/// `p_0 = i∂_t` and `p_a = −i∂_a` enter with the factor `i` dropped, i.e. as
/// `∂_t` and `−∂_a`; `J = i(ψ∂_ψ − ψ*∂_ψ*)` and `I = ψ∂_ψ + ψ*∂_ψ*` keep
/// their definitions.
fn galilei_complex(
    b: &Builder<'_>,
    n: usize,
    mass: f64,
    lambda: f64,
    name: AlgebraName,
) -> Vec<VectorField> {
    let m = b.n_slots / 2;
    let i = C64::new(0.0, 1.0);
    let j_coef = |r: usize| if r < m { ccst(i) } else { ccst(-i) };
    let mut out = vec![b.translation("p_0".into(), 0, 1.0)];
    for a in 1..=n {
        out.push(b.translation(format!("p_{a}"), a, -1.0));
    }
    let mut jf = b.zero("J");
    jf.eta = b.scaling(j_coef);
    out.push(jf);
    for a in 1..=n {
        for c in a + 1..=n {
            out.push(b.rotation(format!("J_{a}{c}"), a, c, -1.0, -1.0));
        }
    }
    // G_a = t p_a − m x_a J
    for a in 1..=n {
        let mut f = b.zero(format!("G_{a}"));
        f.xi[a] = cst(-1.0) * x(0);
        f.eta = b.scaling(|r| cst(-mass) * x(a) * j_coef(r));
        out.push(f);
    }
    if matches!(name, AlgebraName::Ag1II | AlgebraName::Ag2II) {
        // D = 2t p_0 − x_a p_a + λI
        out.push(dilation(b, "D", 1..n + 1, lambda, Some(2.0)));
    }
    if name == AlgebraName::Ag2II {
        // A = t² p_0 − t x_a p_a + λ t I + (m x²/2) J
        let sq = (1..=n).fold(Coef::zero(), |acc, a| acc + x(a) * x(a));
        let mut f = b.zero("A");
        f.xi[0] = x(0) * x(0);
        for a in 1..=n {
            f.xi[a] = x(0) * x(a);
        }
        f.eta = b.scaling(|r| cst(lambda) * x(0) + cst(mass / 2.0) * sq.clone() * j_coef(r));
        out.push(f);
    }
    out
}
