//! Symbolic coefficient functions `f(x, u)` of vector fields, with exact
//! symbolic differentiation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{c64_exp, c64_ln, c64_powf, c64_powi};
use crate::C64;

/// Variable of `(x, u)`-space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X(usize),
    U(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coef {
    Const(C64),
    Var(Var),
    Add(Box<Coef>, Box<Coef>),
    Mul(Box<Coef>, Box<Coef>),
    Div(Box<Coef>, Box<Coef>),
    Neg(Box<Coef>),
    Powi(Box<Coef>, i32),
    Powf(Box<Coef>, f64),
    Exp(Box<Coef>),
    Ln(Box<Coef>),
}

pub fn cst(v: f64) -> Coef {
    Coef::Const(C64::new(v, 0.0))
}

pub fn ccst(v: C64) -> Coef {
    Coef::Const(v)
}

pub fn x(i: usize) -> Coef {
    Coef::Var(Var::X(i))
}

pub fn u(r: usize) -> Coef {
    Coef::Var(Var::U(r))
}

impl Coef {
    pub fn zero() -> Coef {
        cst(0.0)
    }

    pub fn as_const(&self) -> Option<C64> {
        match self {
            Coef::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c == C64::new(0.0, 0.0))
    }

    fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c == C64::new(1.0, 0.0))
    }

    pub fn div(self, rhs: Coef) -> Coef {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Coef::Const(a / b),
            _ if self.is_zero() => Coef::zero(),
            _ if rhs.is_one() => self,
            _ => Coef::Div(Box::new(self), Box::new(rhs)),
        }
    }

    pub fn powi(self, n: i32) -> Coef {
        match (n, self.as_const()) {
            (0, _) => cst(1.0),
            (1, _) => self,
            (_, Some(c)) => Coef::Const(c64_powi(c, n)),
            _ => Coef::Powi(Box::new(self), n),
        }
    }

    pub fn powf(self, p: f64) -> Coef {
        if p == p.trunc() && p.abs() < 64.0 {
            return self.powi(p as i32);
        }
        match self.as_const() {
            Some(c) => Coef::Const(c64_powf(c, p)),
            None => Coef::Powf(Box::new(self), p),
        }
    }

    pub fn exp(self) -> Coef {
        match self.as_const() {
            Some(c) => Coef::Const(c64_exp(c)),
            None => Coef::Exp(Box::new(self)),
        }
    }

    pub fn ln(self) -> Coef {
        match self.as_const() {
            Some(c) => Coef::Const(c64_ln(c)),
            None => Coef::Ln(Box::new(self)),
        }
    }

    /// Evaluates at base coordinates `xs` and field values `us`.
    pub fn eval(&self, xs: &[C64], us: &[C64]) -> C64 {
        match self {
            Coef::Const(c) => *c,
            Coef::Var(Var::X(i)) => xs[*i],
            Coef::Var(Var::U(r)) => us[*r],
            Coef::Add(a, b) => a.eval(xs, us) + b.eval(xs, us),
            Coef::Mul(a, b) => a.eval(xs, us) * b.eval(xs, us),
            Coef::Div(a, b) => a.eval(xs, us) / b.eval(xs, us),
            Coef::Neg(a) => -a.eval(xs, us),
            Coef::Powi(a, n) => c64_powi(a.eval(xs, us), *n),
            Coef::Powf(a, p) => c64_powf(a.eval(xs, us), *p),
            Coef::Exp(a) => c64_exp(a.eval(xs, us)),
            Coef::Ln(a) => c64_ln(a.eval(xs, us)),
        }
    }

    /// Symbolic partial derivative with respect to `v`.
    pub fn diff(&self, v: Var) -> Coef {
        match self {
            Coef::Const(_) => Coef::zero(),
            Coef::Var(w) => cst(if *w == v { 1.0 } else { 0.0 }),
            Coef::Add(a, b) => a.diff(v) + b.diff(v),
            Coef::Mul(a, b) => a.diff(v) * (**b).clone() + (**a).clone() * b.diff(v),
            Coef::Div(a, b) => {
                let num = a.diff(v) * (**b).clone() - (**a).clone() * b.diff(v);
                num.div((**b).clone().powi(2))
            }
            Coef::Neg(a) => -a.diff(v),
            Coef::Powi(a, n) => cst(*n as f64) * (**a).clone().powi(n - 1) * a.diff(v),
            Coef::Powf(a, p) => cst(*p) * (**a).clone().powf(p - 1.0) * a.diff(v),
            Coef::Exp(a) => self.clone() * a.diff(v),
            Coef::Ln(a) => a.diff(v).div((**a).clone()),
        }
    }

    /// Whether the expression mentions `v`.
    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Coef::Const(_) => false,
            Coef::Var(w) => *w == v,
            Coef::Add(a, b) | Coef::Mul(a, b) | Coef::Div(a, b) => {
                a.depends_on(v) || b.depends_on(v)
            }
            Coef::Neg(a) | Coef::Powi(a, _) | Coef::Powf(a, _) | Coef::Exp(a) | Coef::Ln(a) => {
                a.depends_on(v)
            }
        }
    }

    /// Polynomial `Σ c_k t^k` in the given expression.
    pub fn polynomial(coeffs: &[f64], t: Coef) -> Coef {
        coeffs
            .iter()
            .enumerate()
            .fold(Coef::zero(), |acc, (k, &c)| acc + cst(c) * t.clone().powi(k as i32))
    }
}

impl Add for Coef {
    type Output = Coef;
    fn add(self, rhs: Coef) -> Coef {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Coef::Const(a + b),
            _ if self.is_zero() => rhs,
            _ if rhs.is_zero() => self,
            _ => Coef::Add(Box::new(self), Box::new(rhs)),
        }
    }
}

impl Sub for Coef {
    type Output = Coef;
    fn sub(self, rhs: Coef) -> Coef {
        self + (-rhs)
    }
}

impl Mul for Coef {
    type Output = Coef;
    fn mul(self, rhs: Coef) -> Coef {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Coef::Const(a * b),
            _ if self.is_zero() || rhs.is_zero() => Coef::zero(),
            _ if self.is_one() => rhs,
            _ if rhs.is_one() => self,
            _ => Coef::Mul(Box::new(self), Box::new(rhs)),
        }
    }
}

impl Neg for Coef {
    type Output = Coef;
    fn neg(self) -> Coef {
        match self {
            Coef::Const(c) => Coef::Const(-c),
            Coef::Neg(a) => *a,
            other => Coef::Neg(Box::new(other)),
        }
    }
}

fn fmt_const(c: C64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match (c.re, c.im) {
        (re, im) if im == 0.0 => write!(f, "{re}"),
        (re, im) if re == 0.0 => write!(f, "{im}i"),
        (re, im) => write!(f, "({re}{im:+}i)"),
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coef::Const(c) => fmt_const(*c, f),
            Coef::Var(Var::X(i)) => write!(f, "x{i}"),
            Coef::Var(Var::U(r)) => write!(f, "u{r}"),
            Coef::Add(a, b) => write!(f, "({a} + {b})"),
            Coef::Mul(a, b) => write!(f, "{a}*{b}"),
            Coef::Div(a, b) => write!(f, "{a}/({b})"),
            Coef::Neg(a) => write!(f, "-{a}"),
            Coef::Powi(a, n) => write!(f, "({a})^{n}"),
            Coef::Powf(a, p) => write!(f, "({a})^{p}"),
            Coef::Exp(a) => write!(f, "exp({a})"),
            Coef::Ln(a) => write!(f, "log({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    #[test]
    fn derivative_of_product_matches_finite_difference() {
        let f = x(0) * x(0) * u(0) + u(0).exp().div(x(1)) - u(0).powf(0.5);
        let xs = [r(0.7), r(1.3)];
        let us = [r(1.1)];
        for v in [Var::X(0), Var::X(1), Var::U(0)] {
            let d = f.diff(v).eval(&xs, &us);
            let h = 1e-6;
            let (mut xp, mut xm, mut up, mut um) = (xs, xs, us, us);
            match v {
                Var::X(i) => {
                    xp[i] += h;
                    xm[i] -= h;
                }
                Var::U(k) => {
                    up[k] += h;
                    um[k] -= h;
                }
            }
            let fd = (f.eval(&xp, &up) - f.eval(&xm, &um)) / (2.0 * h);
            assert!((d - fd).norm() < 1e-8, "{v:?}: {d} vs {fd}");
        }
    }

    #[test]
    fn constants_fold() {
        assert_eq!(cst(2.0) * cst(3.0) + cst(1.0), cst(7.0));
        assert!((x(0) * cst(0.0)).is_zero());
        assert_eq!(x(1).diff(Var::X(0)), cst(0.0));
    }

    #[test]
    fn polynomial_in_u() {
        let p = Coef::polynomial(&[1.0, 2.0, 3.0], u(0));
        assert_eq!(p.eval(&[], &[r(2.0)]), r(17.0));
        assert_eq!(p.diff(Var::U(0)).eval(&[], &[r(2.0)]), r(14.0));
    }
}
