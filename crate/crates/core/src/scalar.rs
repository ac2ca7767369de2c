//! Numeric scalar abstraction shared by plain complex values and dual numbers.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::C64;

/// Field-like scalar used by every jet evaluator.
///
/// Real jets are carried as complex numbers with zero imaginary part; all
/// arithmetic on such values keeps the imaginary part exactly zero.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_c64(c: C64) -> Self;

    /// The value part (for a dual number, the primal value).
    fn value(&self) -> C64;

    fn powi(self, n: i32) -> Self;
    fn powf(self, p: f64) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;

    fn from_f64(x: f64) -> Self {
        Self::from_c64(C64::new(x, 0.0))
    }

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn scale(self, c: f64) -> Self {
        self * Self::from_f64(c)
    }

    fn sqrt(self) -> Self {
        self.powf(0.5)
    }
}

/// `z^p` for a real exponent, staying on the real axis whenever possible so
/// that real jets never pick up spurious imaginary parts.
pub(crate) fn c64_powf(z: C64, p: f64) -> C64 {
    if p == p.trunc() && p.abs() < i32::MAX as f64 {
        return c64_powi(z, p as i32);
    }
    if z.im == 0.0 && z.re > 0.0 {
        return C64::new(z.re.powf(p), 0.0);
    }
    num_complex::Complex::powf(z, p)
}

pub(crate) fn c64_powi(z: C64, n: i32) -> C64 {
    if z.im == 0.0 {
        return C64::new(z.re.powi(n), 0.0);
    }
    num_complex::Complex::powi(&z, n)
}

pub(crate) fn c64_ln(z: C64) -> C64 {
    if z.im == 0.0 && z.re > 0.0 {
        return C64::new(z.re.ln(), 0.0);
    }
    num_complex::Complex::ln(z)
}

pub(crate) fn c64_exp(z: C64) -> C64 {
    if z.im == 0.0 {
        return C64::new(z.re.exp(), 0.0);
    }
    num_complex::Complex::exp(z)
}

impl Scalar for C64 {
    fn from_c64(c: C64) -> Self {
        c
    }

    fn value(&self) -> C64 {
        *self
    }

    fn powi(self, n: i32) -> Self {
        c64_powi(self, n)
    }

    fn powf(self, p: f64) -> Self {
        c64_powf(self, p)
    }

    fn exp(self) -> Self {
        c64_exp(self)
    }

    fn ln(self) -> Self {
        c64_ln(self)
    }
}
