//! Forward-mode dual numbers over complex values.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::{c64_exp, c64_ln, c64_powf, c64_powi};
use crate::{Scalar, C64};

/// `value + deriv·ε` with `ε² = 0`: carries one directional derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualScalar {
    pub value: C64,
    pub deriv: C64,
}

impl DualScalar {
    pub fn new(value: C64, deriv: C64) -> Self {
        DualScalar { value, deriv }
    }

    pub fn constant(value: C64) -> Self {
        DualScalar {
            value,
            deriv: C64::new(0.0, 0.0),
        }
    }

    pub fn variable(value: C64) -> Self {
        DualScalar {
            value,
            deriv: C64::new(1.0, 0.0),
        }
    }

    fn chain(self, value: C64, slope: C64) -> Self {
        DualScalar {
            value,
            deriv: slope * self.deriv,
        }
    }
}

impl Add for DualScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        DualScalar::new(self.value + rhs.value, self.deriv + rhs.deriv)
    }
}

impl Sub for DualScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        DualScalar::new(self.value - rhs.value, self.deriv - rhs.deriv)
    }
}

impl Mul for DualScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        DualScalar::new(
            self.value * rhs.value,
            self.value * rhs.deriv + self.deriv * rhs.value,
        )
    }
}

impl Div for DualScalar {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q = self.value / rhs.value;
        DualScalar::new(q, (self.deriv - q * rhs.deriv) / rhs.value)
    }
}

impl Neg for DualScalar {
    type Output = Self;
    fn neg(self) -> Self {
        DualScalar::new(-self.value, -self.deriv)
    }
}

impl Scalar for DualScalar {
    fn from_c64(c: C64) -> Self {
        DualScalar::constant(c)
    }

    fn value(&self) -> C64 {
        self.value
    }

    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return DualScalar::constant(C64::new(1.0, 0.0));
        }
        let slope = c64_powi(self.value, n - 1) * n as f64;
        self.chain(c64_powi(self.value, n), slope)
    }

    fn powf(self, p: f64) -> Self {
        if p == 0.0 {
            return DualScalar::constant(C64::new(1.0, 0.0));
        }
        let slope = c64_powf(self.value, p - 1.0) * p;
        self.chain(c64_powf(self.value, p), slope)
    }

    fn exp(self) -> Self {
        let e = c64_exp(self.value);
        self.chain(e, e)
    }

    fn ln(self) -> Self {
        self.chain(c64_ln(self.value), C64::new(1.0, 0.0) / self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(v: f64, dv: f64) -> DualScalar {
        DualScalar::new(C64::new(v, 0.0), C64::new(dv, 0.0))
    }

    proptest! {
        // Product rule holds exactly: both sides perform the same roundings.
        #[test]
        fn product_rule(a in -3.0..3.0f64, da in -3.0..3.0f64, b in -3.0..3.0f64, db in -3.0..3.0f64) {
            let p = d(a, da) * d(b, db);
            prop_assert_eq!(p.value.re, a * b);
            prop_assert_eq!(p.deriv.re, a * db + da * b);
        }

        #[test]
        fn chain_rule_through_exp(a in -3.0..3.0f64, da in -3.0..3.0f64) {
            let e = d(a, da).exp();
            prop_assert_eq!(e.deriv.re, a.exp() * da);
        }

        #[test]
        fn chain_rule_through_powi(a in 0.5..3.0f64, da in -3.0..3.0f64, n in 1i32..6) {
            let e = d(a, da).powi(n);
            prop_assert_eq!(e.deriv.re, a.powi(n - 1) * n as f64 * da);
        }

        #[test]
        fn quotient_matches_finite_difference(a in 0.5..3.0f64, b in 0.5..3.0f64, db in -1.0..1.0f64) {
            let q = d(a, 0.0) / d(b, db);
            let h = 1e-6;
            let fd = (a / (b + h * db) - a / (b - h * db)) / (2.0 * h);
            prop_assert!((q.deriv.re - fd).abs() < 1e-6 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn real_values_stay_real() {
        let x = d(1.7, 1.0);
        let y = (x.powf(0.3) * x.ln() / x.exp()).powi(3);
        assert_eq!(y.value.im, 0.0);
        assert_eq!(y.deriv.im, 0.0);
    }
}
