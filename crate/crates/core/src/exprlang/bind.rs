use thiserror::Error;

use super::ast::{BinOp, Expr};
use crate::invcat::tensor::{dot, lower, lower_vec, mat_mul, mat_vec, r_0, r_k, s_jk, s_k, trace, Mat};
use crate::invcat::{eval_tensor, DualJet, EvalError, JetView, ScalarJetFunction, TensorName, TensorParams, TensorValue};
use crate::jetspace::{FieldKind, Geometry, JetCoordinateId};
use crate::liealg::AlgebraSpec;
use crate::linalg::determinant;
use crate::verify::dual::DualScalar;
use crate::{Scalar, C64};

type D = DualScalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BindError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("index out of range: `{0}`")]
    IndexOutOfRange(String),
    #[error("`{name}`: {message}")]
    Arity { name: String, message: String },
    #[error("type mismatch: {0}")]
    Type(String),
    #[error("`conj` needs a complex field")]
    ConjOnReal,
}

/// Geometry, field layout and tensor parameters an expression is bound under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binding {
    pub geometry: Geometry,
    /// Number of physical fields `m`.
    pub fields: usize,
    pub kind: FieldKind,
    /// λ used by `theta`.
    pub lambda: f64,
    /// Galilei coupling used by the Galilei tensors.
    pub mu: C64,
}

impl Binding {
    pub fn new(geometry: Geometry, fields: usize, kind: FieldKind) -> Self {
        Binding {
            geometry,
            fields,
            kind,
            lambda: 1.0,
            mu: C64::new(1.0, 0.0),
        }
    }

    pub fn for_spec(spec: &AlgebraSpec) -> Self {
        let kind = spec.field_kind();
        let mu = match kind {
            FieldKind::Real => C64::new(spec.mu.unwrap_or(1.0), 0.0),
            FieldKind::Complex => C64::new(0.0, spec.mass.unwrap_or(1.0)),
        };
        Binding {
            geometry: spec.geometry(),
            fields: spec.m,
            kind,
            lambda: spec.effective_lambda().unwrap_or(1.0),
            mu,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Scalar,
    Vector,
    Matrix,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Scalar => "scalar",
            Kind::Vector => "vector",
            Kind::Matrix => "matrix",
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Func {
    Exp,
    Log,
    Sqrt,
}

#[derive(Debug, Clone)]
enum Node {
    Const(C64),
    Coord(JetCoordinateId),
    Tensor(TensorName, usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Func(Func, Box<Node>),
    Conj(Box<Node>),
    S(usize, Box<Node>),
    R(usize, Box<Node>, Box<Node>),
    Sjk(usize, usize, Box<Node>, Box<Node>),
    Tr(Box<Node>),
    Det(Box<Node>),
    Contract(Vec<Node>),
}

#[derive(Debug, Clone)]
enum Val {
    S(D),
    V(Vec<D>),
    M(Mat<D>),
}

/// Resolves every symbol and call of `expr` and returns a differentiable
/// evaluator labelled with the printed expression.
pub fn bind(expr: &Expr, binding: &Binding) -> Result<ScalarJetFunction, BindError> {
    let (node, kind) = compile(expr, binding)?;
    if kind != Kind::Scalar {
        return Err(BindError::Type(format!("expression is a {}, expected a scalar", kind.name())));
    }
    let b = *binding;
    Ok(ScalarJetFunction::new(expr.to_string(), move |jet| {
        let env = Env {
            view: JetView::new(jet, b.geometry),
            jet,
            binding: b,
            conj: false,
        };
        match eval(&node, &env)? {
            Val::S(x) => Ok(x),
            _ => unreachable!("checked at bind time"),
        }
    }))
}

fn compile(e: &Expr, b: &Binding) -> Result<(Node, Kind), BindError> {
    match e {
        Expr::Num(x) => Ok((Node::Const(C64::new(*x, 0.0)), Kind::Scalar)),
        Expr::Sym(s) => symbol(s, b),
        Expr::Neg(a) => {
            let (a, k) = compile(a, b)?;
            Ok((Node::Neg(Box::new(a)), k))
        }
        Expr::Bin(op, l, r) => {
            let (l, kl) = compile(l, b)?;
            let (r, kr) = compile(r, b)?;
            let kind = match op {
                BinOp::Add | BinOp::Sub if kl == kr => kl,
                BinOp::Mul if kl == Kind::Scalar => kr,
                BinOp::Mul | BinOp::Div if kr == Kind::Scalar => kl,
                BinOp::Pow if kl == Kind::Scalar && kr == Kind::Scalar => Kind::Scalar,
                _ => {
                    return Err(BindError::Type(format!(
                        "cannot combine {} and {} with `{}`",
                        kl.name(),
                        kr.name(),
                        e_op(*op)
                    )))
                }
            };
            Ok((Node::Bin(*op, Box::new(l), Box::new(r)), kind))
        }
        Expr::Call { name, args, fields } => call(name, args, fields, b),
    }
}

fn e_op(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::Mul => "*",
        BinOp::Div => "/",
        BinOp::Pow => "^",
    }
}

fn symbol(s: &str, b: &Binding) -> Result<(Node, Kind), BindError> {
    let out_of_range = || BindError::IndexOutOfRange(s.to_string());
    if s == "i" {
        return Ok((Node::Const(C64::new(0.0, 1.0)), Kind::Scalar));
    }
    if s == "t" {
        let i = b.geometry.base_for_symbol(0).ok_or_else(out_of_range)?;
        return Ok((Node::Coord(JetCoordinateId::Base(i)), Kind::Scalar));
    }
    if let Some(k) = s.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
        let i = b.geometry.base_for_symbol(k).ok_or_else(out_of_range)?;
        return Ok((Node::Coord(JetCoordinateId::Base(i)), Kind::Scalar));
    }
    if let Ok(name) = s.replace('_', "-").parse::<TensorName>() {
        let kind = match eval_kind(name) {
            true => Kind::Matrix,
            false => Kind::Vector,
        };
        return Ok((Node::Tensor(name, 0), kind));
    }
    let Some(rest) = s.strip_prefix('u') else {
        return Err(BindError::UnknownSymbol(s.to_string()));
    };
    let (digits, suffix) = match rest.split_once('_') {
        Some((d, suf)) => (d, Some(suf)),
        None => (rest, None),
    };
    let r = if digits.is_empty() {
        1
    } else {
        digits.parse::<usize>().map_err(|_| BindError::UnknownSymbol(s.to_string()))?
    };
    if r == 0 || r > b.fields {
        return Err(out_of_range());
    }
    let field = r - 1;
    let Some(suffix) = suffix else {
        return Ok((Node::Coord(JetCoordinateId::Field(field)), Kind::Scalar));
    };
    let mut idx = Vec::new();
    let mut chars = suffix;
    while !chars.is_empty() {
        if let Some(rest) = chars.strip_prefix('t') {
            idx.push(b.geometry.base_for_symbol(0).ok_or_else(out_of_range)?);
            chars = rest;
        } else if let Some(rest) = chars.strip_prefix('x') {
            let len = rest.bytes().take_while(u8::is_ascii_digit).count();
            if len == 0 {
                return Err(BindError::UnknownSymbol(s.to_string()));
            }
            let k: usize = rest[..len].parse().map_err(|_| out_of_range())?;
            idx.push(b.geometry.base_for_symbol(k).ok_or_else(out_of_range)?);
            chars = &rest[len..];
        } else {
            return Err(BindError::UnknownSymbol(s.to_string()));
        }
    }
    let id = match idx[..] {
        [i] => JetCoordinateId::D1 { field, i },
        [i, j] => JetCoordinateId::D2 { field, i, j }.normalized(),
        _ => return Err(BindError::UnknownSymbol(s.to_string())),
    };
    Ok((Node::Coord(id), Kind::Scalar))
}

/// Whether the tensor is a matrix.
fn eval_kind(name: TensorName) -> bool {
    matches!(
        name,
        TensorName::Hess
            | TensorName::Theta
            | TensorName::W
            | TensorName::WCovariant
            | TensorName::EikonalTheta
            | TensorName::GalileiThetaAb
    )
}

fn int_literal(name: &str, e: &Expr, what: &str) -> Result<usize, BindError> {
    match e {
        Expr::Num(x) if *x >= 0.0 && x.fract() == 0.0 && *x < 1e6 => Ok(*x as usize),
        _ => Err(BindError::Arity {
            name: name.to_string(),
            message: format!("{what} must be a non-negative integer literal, found `{e}`"),
        }),
    }
}

fn call(name: &str, args: &[Expr], fields: &[Expr], b: &Binding) -> Result<(Node, Kind), BindError> {
    let arity = |message: String| BindError::Arity {
        name: name.to_string(),
        message,
    };
    let field_sel = |want: usize| -> Result<Vec<usize>, BindError> {
        if fields.is_empty() {
            return Ok(vec![0; want]);
        }
        if fields.len() != want {
            return Err(arity(format!("expected {want} field selectors, found {}", fields.len())));
        }
        fields
            .iter()
            .map(|f| {
                let r = int_literal(name, f, "field selector")?;
                if r == 0 || r > b.fields {
                    Err(BindError::IndexOutOfRange(format!("{name}(...; {r})")))
                } else {
                    Ok(r - 1)
                }
            })
            .collect()
    };
    let typed = |e: &Expr, want: Kind| -> Result<Box<Node>, BindError> {
        let (n, k) = compile(e, b)?;
        if k != want {
            return Err(BindError::Type(format!(
                "argument `{e}` of `{name}` is a {}, expected a {}",
                k.name(),
                want.name()
            )));
        }
        Ok(Box::new(n))
    };
    let no_fields = || {
        if fields.is_empty() {
            Ok(())
        } else {
            Err(arity("takes no field selectors".into()))
        }
    };
    let hess = |r: usize| Box::new(Node::Tensor(TensorName::Hess, r));
    let grad = |r: usize| Box::new(Node::Tensor(TensorName::Grad, r));
    match name {
        "S" => {
            let k = int_literal(name, args.first().ok_or_else(|| arity("expected S(k)".into()))?, "order")?;
            if k == 0 {
                return Err(arity("order must be at least 1".into()));
            }
            match args.len() {
                1 => Ok((Node::S(k, hess(field_sel(1)?[0])), Kind::Scalar)),
                2 => {
                    no_fields()?;
                    Ok((Node::S(k, typed(&args[1], Kind::Matrix)?), Kind::Scalar))
                }
                n => Err(arity(format!("expected 1 or 2 arguments, found {n}"))),
            }
        }
        "R" => {
            let k = int_literal(name, args.first().ok_or_else(|| arity("expected R(k)".into()))?, "order")?;
            match args.len() {
                1 => {
                    let r = field_sel(1)?[0];
                    Ok((Node::R(k, grad(r), hess(r)), Kind::Scalar))
                }
                3 => {
                    no_fields()?;
                    Ok((Node::R(k, typed(&args[1], Kind::Vector)?, typed(&args[2], Kind::Matrix)?), Kind::Scalar))
                }
                n => Err(arity(format!("expected 1 or 3 arguments, found {n}"))),
            }
        }
        "Sjk" => {
            if args.len() != 2 && args.len() != 4 {
                return Err(arity(format!("expected 2 or 4 arguments, found {}", args.len())));
            }
            let j = int_literal(name, &args[0], "j")?;
            let k = int_literal(name, &args[1], "k")?;
            if j > k {
                return Err(arity(format!("needs j <= k, found j = {j}, k = {k}")));
            }
            if args.len() == 2 {
                let rs = field_sel(2)?;
                Ok((Node::Sjk(j, k, hess(rs[0]), hess(rs[1])), Kind::Scalar))
            } else {
                no_fields()?;
                Ok((
                    Node::Sjk(j, k, typed(&args[2], Kind::Matrix)?, typed(&args[3], Kind::Matrix)?),
                    Kind::Scalar,
                ))
            }
        }
        "tr" | "det" => {
            no_fields()?;
            let [a] = args else {
                return Err(arity(format!("expected 1 argument, found {}", args.len())));
            };
            let m = typed(a, Kind::Matrix)?;
            Ok((if name == "tr" { Node::Tr(m) } else { Node::Det(m) }, Kind::Scalar))
        }
        "contract" => {
            no_fields()?;
            let compiled: Vec<(Node, Kind)> = args.iter().map(|a| compile(a, b)).collect::<Result<_, _>>()?;
            let kinds: Vec<Kind> = compiled.iter().map(|c| c.1).collect();
            match kinds[..] {
                [Kind::Vector, Kind::Vector] | [Kind::Matrix, Kind::Matrix] | [Kind::Vector, Kind::Matrix, Kind::Vector] => {
                    Ok((Node::Contract(compiled.into_iter().map(|c| c.0).collect()), Kind::Scalar))
                }
                _ => Err(BindError::Type(format!(
                    "`contract` takes (vector, vector), (matrix, matrix) or (vector, matrix, vector), found ({})",
                    kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
                ))),
            }
        }
        "exp" | "log" | "sqrt" | "conj" => {
            no_fields()?;
            let [a] = args else {
                return Err(arity(format!("expected 1 argument, found {}", args.len())));
            };
            let (node, kind) = compile(a, b)?;
            let node = Box::new(node);
            if name == "conj" {
                if b.kind != FieldKind::Complex {
                    return Err(BindError::ConjOnReal);
                }
                return Ok((Node::Conj(node), kind));
            }
            if kind != Kind::Scalar {
                return Err(BindError::Type(format!("`{name}` takes a scalar, found a {}", kind.name())));
            }
            let f = match name {
                "exp" => Func::Exp,
                "log" => Func::Log,
                _ => Func::Sqrt,
            };
            Ok((Node::Func(f, node), Kind::Scalar))
        }
        _ => Err(BindError::UnknownFunction(name.to_string())),
    }
}

struct Env<'a> {
    view: JetView<'a>,
    jet: &'a DualJet,
    binding: Binding,
    conj: bool,
}

impl Env<'_> {
    fn slot(&self, r: usize) -> usize {
        if self.conj {
            self.jet.conj_slot(r)
        } else {
            r
        }
    }

    fn remap(&self, id: JetCoordinateId) -> JetCoordinateId {
        match id {
            JetCoordinateId::Field(r) => JetCoordinateId::Field(self.slot(r)),
            JetCoordinateId::D1 { field, i } => JetCoordinateId::D1 { field: self.slot(field), i },
            JetCoordinateId::D2 { field, i, j } => JetCoordinateId::D2 { field: self.slot(field), i, j },
            base => base,
        }
    }

    fn constant(&self, c: C64) -> D {
        D::constant(if self.conj { c.conj() } else { c })
    }
}

fn domain(msg: &str) -> EvalError {
    EvalError::Domain(msg.to_string())
}

fn positive(x: D, what: &str) -> Result<(), EvalError> {
    let v = x.value();
    if v.im == 0.0 && v.re > 0.0 {
        Ok(())
    } else {
        Err(domain(&format!("{what} of a non-positive value")))
    }
}

fn scalar(v: Val) -> D {
    match v {
        Val::S(x) => x,
        _ => unreachable!("checked at bind time"),
    }
}

fn vector(v: Val) -> Vec<D> {
    match v {
        Val::V(x) => x,
        _ => unreachable!("checked at bind time"),
    }
}

fn matrix(v: Val) -> Mat<D> {
    match v {
        Val::M(x) => x,
        _ => unreachable!("checked at bind time"),
    }
}

fn map(v: Val, f: impl Fn(D) -> D) -> Val {
    match v {
        Val::S(x) => Val::S(f(x)),
        Val::V(x) => Val::V(x.into_iter().map(f).collect()),
        Val::M(x) => Val::M(x.into_iter().map(|row| row.into_iter().map(&f).collect()).collect()),
    }
}

fn zip(a: Val, b: Val, f: impl Fn(D, D) -> D) -> Val {
    match (a, b) {
        (Val::S(x), Val::S(y)) => Val::S(f(x, y)),
        (Val::V(x), Val::V(y)) => Val::V(x.into_iter().zip(y).map(|(p, q)| f(p, q)).collect()),
        (Val::M(x), Val::M(y)) => Val::M(
            x.into_iter()
                .zip(y)
                .map(|(r, s)| r.into_iter().zip(s).map(|(p, q)| f(p, q)).collect())
                .collect(),
        ),
        _ => unreachable!("checked at bind time"),
    }
}

fn eval(node: &Node, env: &Env<'_>) -> Result<Val, EvalError> {
    let metric = env.view.metric();
    Ok(match node {
        Node::Const(c) => Val::S(env.constant(*c)),
        Node::Coord(id) => Val::S(env.jet.get(env.remap(*id))),
        Node::Tensor(name, r) => {
            let params = TensorParams {
                lambda: env.binding.lambda,
                mu: if env.conj { env.binding.mu.conj() } else { env.binding.mu },
                field: env.slot(*r),
                reference: env.slot(0),
            };
            match eval_tensor(*name, &env.view, &params)? {
                TensorValue::Vector(v) => Val::V(v),
                TensorValue::Matrix(m) => Val::M(m),
            }
        }
        Node::Neg(a) => map(eval(a, env)?, |x| -x),
        Node::Bin(op, l, r) => {
            let (a, c) = (eval(l, env)?, eval(r, env)?);
            match op {
                BinOp::Add => zip(a, c, |p, q| p + q),
                BinOp::Sub => zip(a, c, |p, q| p - q),
                BinOp::Mul => match (a, c) {
                    (Val::S(s), v) | (v, Val::S(s)) => map(v, |x| x * s),
                    _ => unreachable!("checked at bind time"),
                },
                BinOp::Div => {
                    let s = scalar(c);
                    map(a, |x| x / s)
                }
                BinOp::Pow => Val::S(power(scalar(a), r, env)?),
            }
        }
        Node::Func(f, a) => {
            let x = scalar(eval(a, env)?);
            Val::S(match f {
                Func::Exp => x.exp(),
                Func::Log => {
                    if env.binding.kind == FieldKind::Real {
                        positive(x, "log")?;
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    positive(x, "sqrt")?;
                    x.powf(0.5)
                }
            })
        }
        Node::Conj(a) => {
            let inner = Env {
                view: env.view,
                jet: env.jet,
                binding: env.binding,
                conj: !env.conj,
            };
            eval(a, &inner)?
        }
        Node::S(k, m) => Val::S(s_k(&matrix(eval(m, env)?), &metric, *k)),
        Node::R(k, v, m) => {
            let (v, m) = (vector(eval(v, env)?), matrix(eval(m, env)?));
            Val::S(if *k == 0 {
                r_0(&v, &m).ok_or_else(|| EvalError::Singular("R(0)".into()))?
            } else {
                r_k(&v, &m, &metric, *k)
            })
        }
        Node::Sjk(j, k, a, c) => {
            let (a, c) = (matrix(eval(a, env)?), matrix(eval(c, env)?));
            Val::S(s_jk(&a, &c, &metric, *j, *k))
        }
        Node::Tr(m) => Val::S(trace(&lower(&matrix(eval(m, env)?), &metric))),
        Node::Det(m) => Val::S(determinant(&matrix(eval(m, env)?))),
        Node::Contract(args) => {
            let vals: Vec<Val> = args.iter().map(|a| eval(a, env)).collect::<Result<_, _>>()?;
            Val::S(match &vals[..] {
                [Val::V(a), Val::V(b)] => dot(&lower_vec(a, &metric), b),
                [Val::M(a), Val::M(b)] => trace(&mat_mul(&lower(a, &metric), &lower(b, &metric))),
                [Val::V(a), Val::M(m), Val::V(b)] => dot(&lower_vec(a, &metric), &mat_vec(m, &lower_vec(b, &metric))),
                _ => unreachable!("checked at bind time"),
            })
        }
    })
}

fn power(base: D, exponent: &Node, env: &Env<'_>) -> Result<D, EvalError> {
    if let Some(p) = const_value(exponent) {
        if p.fract() == 0.0 && p.abs() < i32::MAX as f64 {
            return Ok(base.powi(p as i32));
        }
        positive(base, "non-integer power")?;
        return Ok(base.powf(p));
    }
    positive(base, "non-integer power")?;
    let e = scalar(eval(exponent, env)?);
    Ok((e * base.ln()).exp())
}

/// Value of a constant real exponent, folding unary minus.
fn const_value(n: &Node) -> Option<f64> {
    match n {
        Node::Const(c) if c.im == 0.0 => Some(c.re),
        Node::Neg(a) => const_value(a).map(|x| -x),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse;
    use crate::invcat::{equation, EquationName, EquationParams, Reading};
    use crate::jetspace::{sample_generic, JetPoint};
    use crate::liealg::{AlgebraName, AlgebraSpec};
    use crate::verify::Sampler;

    fn bound(src: &str, b: &Binding) -> ScalarJetFunction {
        bind(&parse(src).unwrap(), b).unwrap()
    }

    fn euclid(n: usize) -> Binding {
        Binding::new(Geometry::Euclidean { n }, 1, FieldKind::Real)
    }

    fn points(spec: &AlgebraSpec, k: u64) -> Vec<JetPoint> {
        let s = Sampler::for_spec(spec);
        (0..k).map(|i| s.sample(11, i)).collect()
    }

    #[test]
    fn arithmetic_precedence_value() {
        let f = bound("2+3*4^2", &euclid(3));
        let p = sample_generic(3, 1, FieldKind::Real, 1).unwrap();
        assert_eq!(f.eval(&p).unwrap(), C64::new(50.0, 0.0));
    }

    #[test]
    fn out_of_range_index_is_a_bind_error() {
        let err = bind(&parse("u1_x9").unwrap(), &euclid(3)).unwrap_err();
        assert!(err.to_string().contains("index out of range"), "{err}");
        assert!(matches!(bind(&parse("u2").unwrap(), &euclid(3)), Err(BindError::IndexOutOfRange(_))));
        assert!(matches!(bind(&parse("t").unwrap(), &euclid(3)), Err(BindError::IndexOutOfRange(_))));
    }

    #[test]
    fn unknown_names_and_arity() {
        let b = euclid(3);
        assert!(matches!(bind(&parse("v").unwrap(), &b), Err(BindError::UnknownSymbol(_))));
        assert!(matches!(bind(&parse("foo(1)").unwrap(), &b), Err(BindError::UnknownFunction(_))));
        assert!(matches!(bind(&parse("S(1, 2, 3)").unwrap(), &b), Err(BindError::Arity { .. })));
        assert!(matches!(bind(&parse("S(x1)").unwrap(), &b), Err(BindError::Arity { .. })));
        assert!(matches!(bind(&parse("hess").unwrap(), &b), Err(BindError::Type(_))));
        assert!(matches!(bind(&parse("grad + hess").unwrap(), &b), Err(BindError::Type(_))));
        assert!(matches!(bind(&parse("conj(u)").unwrap(), &b), Err(BindError::ConjOnReal)));
    }

    #[test]
    fn gradient_of_u_is_a_unit_vector() {
        let f = bound("u", &euclid(3));
        let p = sample_generic(3, 1, FieldKind::Real, 5).unwrap();
        let g = f.grad(&p).unwrap();
        let k = p.shape().index(JetCoordinateId::Field(0)).unwrap();
        for (i, z) in g.iter().enumerate() {
            assert_eq!(*z, C64::new(if i == k { 1.0 } else { 0.0 }, 0.0));
        }
    }

    #[test]
    fn derivative_symbols_resolve() {
        let spec = AlgebraSpec::new(AlgebraName::AgI, 3).mu(1.0);
        let b = Binding::for_spec(&spec);
        let p = &points(&spec, 1)[0];
        for (src, id) in [
            ("u_t", JetCoordinateId::D1 { field: 0, i: 0 }),
            ("u_tt", JetCoordinateId::D2 { field: 0, i: 0, j: 0 }),
            ("u_x1t", JetCoordinateId::D2 { field: 0, i: 0, j: 1 }),
            ("u1_x3x2", JetCoordinateId::D2 { field: 0, i: 2, j: 3 }),
            ("x2", JetCoordinateId::Base(2)),
            ("t", JetCoordinateId::Base(0)),
        ] {
            assert_eq!(bound(src, &b).eval(p).unwrap(), p.get(id).unwrap(), "{src}");
        }
    }

    #[test]
    fn builtins_match_catalog_contractions() {
        let spec = AlgebraSpec::new(AlgebraName::AP, 3).fields(2);
        let b = Binding::for_spec(&spec);
        let metric = spec.geometry().metric();
        for p in points(&spec, 20) {
            let jet = DualJet::new(&p, None);
            let v = JetView::new(&jet, spec.geometry());
            let (g1, h1, h2) = (v.grad(0), v.hess(0), v.hess(1));
            let cases = [
                ("S(2)", s_k(&h1, &metric, 2)),
                ("S(3; 2)", s_k(&h2, &metric, 3)),
                ("R(3)", r_k(&g1, &h1, &metric, 3)),
                ("R(0)", r_0(&g1, &h1).unwrap()),
                ("Sjk(1, 3; 1, 2)", s_jk(&h1, &h2, &metric, 1, 3)),
                ("tr(hess)", s_k(&h1, &metric, 1)),
                ("contract(grad, hess, grad)", r_k(&g1, &h1, &metric, 2)),
                ("contract(hess, hess)", s_k(&h1, &metric, 2)),
            ];
            for (src, want) in cases {
                let got = bound(src, &b).eval(&p).unwrap();
                assert!((got - want.value()).norm() <= 1e-12 * (1.0 + want.value().norm()), "{src}");
            }
        }
    }

    #[test]
    fn equation_forms_match_residuals() {
        for (src, name) in [
            ("(1 - R(1)) * S(1) - R(2)", EquationName::BornInfeld),
            ("R(2) - R(1) * S(1)", EquationName::QuasilinearEikonal),
        ] {
            let eq = equation(name, &EquationParams { reading: Reading::Printed, ..Default::default() }).unwrap();
            let f = bound(src, &Binding::for_spec(&eq.spec));
            for p in points(&eq.spec, 20) {
                let (a, c) = (f.eval(&p).unwrap(), eq.residual.eval(&p).unwrap());
                assert!((a - c).norm() <= 1e-12 * (1.0 + c.norm()), "{src}: {a} vs {c}");
            }
        }
    }

    #[test]
    fn conj_swaps_partner_slots() {
        let spec = AlgebraSpec::new(AlgebraName::AgII, 3).mass(1.0);
        let b = Binding::for_spec(&spec);
        let p = &points(&spec, 1)[0];
        let a = bound("conj(u_x1 * i)", &b).eval(p).unwrap();
        assert!((a - (p.du(0, 1) * C64::new(0.0, 1.0)).conj()).norm() < 1e-14);
    }

    #[test]
    fn non_integer_power_needs_positive_base() {
        let b = euclid(3);
        let mut p = sample_generic(3, 1, FieldKind::Real, 2).unwrap();
        p.set(JetCoordinateId::Field(0), C64::new(-1.5, 0.0)).unwrap();
        assert!(matches!(bound("u^0.5", &b).eval(&p), Err(EvalError::Domain(_))));
        assert!(bound("u^3", &b).eval(&p).is_ok());
        assert!(bound("u^-2", &b).eval(&p).is_ok());
    }
}
