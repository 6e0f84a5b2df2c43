//! Scalar abstraction shared by the algebraic core.
//!
//! Determinants, Laurent polynomials and Kasteleyn matrices are written once
//! against [`Scalar`] and instantiated with `f64`, `f32`, `Complex64` or
//! exact [`Rational`] arithmetic.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Exact rational numbers backed by arbitrary precision integers.
pub type Rational = BigRational;

/// A field-like number type usable in Gaussian elimination and polynomial
/// evaluation.
pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static {
    /// True when arithmetic is exact; pivoting then only needs a nonzero entry.
    const EXACT: bool;

    /// Size used to rank pivot candidates.
    fn magnitude(&self) -> f64;

    fn from_i64(x: i64) -> Self;

    /// Converts an edge weight. Exact scalars require the exact value.
    fn from_weight(value: f64, exact: Option<&Rational>) -> Option<Self>;

    fn to_complex(&self) -> Complex64;

    /// Integer power, negative exponents allowed for nonzero bases.
    fn powi(&self, k: i32) -> Self {
        let mut base = if k < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn from_i64(x: i64) -> Self {
        x as f64
    }
    fn from_weight(value: f64, _exact: Option<&Rational>) -> Option<Self> {
        Some(value)
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn powi(&self, k: i32) -> Self {
        f64::powi(*self, k)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    fn magnitude(&self) -> f64 {
        self.abs() as f64
    }
    fn from_i64(x: i64) -> Self {
        x as f32
    }
    fn from_weight(value: f64, _exact: Option<&Rational>) -> Option<Self> {
        Some(value as f32)
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self as f64, 0.0)
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn from_i64(x: i64) -> Self {
        Complex64::new(x as f64, 0.0)
    }
    fn from_weight(value: f64, _exact: Option<&Rational>) -> Option<Self> {
        Some(Complex64::new(value, 0.0))
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn powi(&self, k: i32) -> Self {
        Complex64::powi(self, k)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn from_i64(x: i64) -> Self {
        Rational::from_integer(BigInt::from(x))
    }
    fn from_weight(_value: f64, exact: Option<&Rational>) -> Option<Self> {
        exact.cloned()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

/// Parses `"p"` or `"p/q"` into a positive-or-negative rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Recognizes `x` as a rational with denominator at most `max_den` when it is
/// within `rel_tol` of one, via continued fractions.
pub fn recognize_rational(x: f64, max_den: i64, rel_tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let target = x.abs();
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut frac = target;
    for _ in 0..64 {
        let a = frac.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        let approx = h2 as f64 / k2 as f64;
        if (approx - target).abs() <= rel_tol * target.max(1e-300) {
            return Some(Rational::new(BigInt::from(sign * h2), BigInt::from(k2)));
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let rem = frac - a as f64;
        if rem <= 0.0 {
            break;
        }
        frac = 1.0 / rem;
    }
    None
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `true` for exact zero, or float values below `tol` in magnitude.
pub fn is_negligible<T: Scalar>(x: &T, tol: f64) -> bool {
    if T::EXACT {
        x.is_zero()
    } else {
        x.magnitude() <= tol
    }
}

/// Sign of a real scalar (`f64` or rational); `0` for zero.
pub fn real_sign<T: Scalar>(x: &T) -> i32 {
    let c = x.to_complex().re;
    if x.is_zero() {
        0
    } else if c > 0.0 {
        1
    } else if c < 0.0 {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recognizes_simple_fractions() {
        let ten = recognize_rational((2.302585092994046f64).exp(), 1000, 1e-12).unwrap();
        assert_eq!(ten, Rational::from_i64(10));
        let half = recognize_rational(0.5, 1000, 1e-12).unwrap();
        assert_eq!(half, parse_rational("1/2").unwrap());
        assert!(recognize_rational(std::f64::consts::PI, 1000, 1e-12).is_none());
    }

    #[test]
    fn powi_handles_negative_exponents() {
        let two = Rational::from_i64(2);
        assert_eq!(two.powi(-3), parse_rational("1/8").unwrap());
        assert_eq!(Scalar::powi(&2.0f64, -2), 0.25);
        let z = Complex64::new(0.0, 1.0);
        assert!((Scalar::powi(&z, 4) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn parse_rejects_zero_denominator() {
        assert!(parse_rational("3/0").is_none());
        assert_eq!(parse_rational(" -7 ").unwrap(), Rational::from_i64(-7));
    }
}
