//! Exact rationals and the scalar abstraction shared by the exact and
//! floating-point arithmetic paths.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number in canonical (reduced) form.
pub type Rational = BigRational;

/// Field elements the curvature formulas are generic over.
pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> {
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact zero test for rationals, `|x| <= tol` for floats.
    fn is_negligible(&self, tol: f64) -> bool;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&int(v))
    }
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
}

/// `p / q` as a rational. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parses `p`, `-p`, `+p` or `p/q` with `q > 0`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let is_int = |t: &str| {
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !is_int(num) {
        return Err(bad());
    }
    let p: BigInt = num.trim_start_matches('+').parse().map_err(|_| bad())?;
    let q: BigInt = match den {
        None => BigInt::one(),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            d.parse().map_err(|_| bad())?
        }
    };
    if !q.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "denominator must be positive in {s:?}"
        )));
    }
    Ok(Rational::new(p, q))
}

/// Exact square root when `r` is the square of a rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn fmt_rational(r: &Rational) -> String {
    r.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_supported_forms() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-1/10").unwrap(), rat(-1, 10));
    }

    #[test]
    fn rejects_malformed() {
        for s in ["", "1/", "/2", "1/0", "1/-2", "1.5", "a", "1/2/3", "--1"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn canonical_output() {
        assert_eq!(fmt_rational(&rat(6, 4)), "3/2");
        assert_eq!(fmt_rational(&rat(-4, 2)), "-2");
        assert_eq!(fmt_rational(&int(0)), "0");
    }

    #[test]
    fn square_roots() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&int(2)), None);
        assert_eq!(rational_sqrt(&int(-4)), None);
        assert_eq!(rational_sqrt(&int(0)), Some(int(0)));
    }
}
