//! Exact arithmetic for the two ambient rings: the real quadratic integers
//! `Z[sqrt D]` and the `p`-adic rationals `Z[1/p]`.
//!
//! Every comparison that decides membership in a window or a region is
//! carried out in integer arithmetic. Floating point never appears here;
//! decimal strings are produced from exact values for reporting only.

mod padic;
mod quad;

pub use padic::{PadicRat, Prime, Valuation};
pub use quad::{QuadInt, Radicand};

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::ArithError;

pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int_rat(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Parses `"a"` or `"a/b"` with integer `a`, `b`. Decimal notation is refused.
pub fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let err = || ArithError::Parse {
        what: "rational",
        input: s.to_string(),
    };
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(num, den))
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Sign of `a + b*sqrt(d)` for a non-square `d`.
pub fn surd_sign(a: &BigInt, b: &BigInt, d: u64) -> Ordering {
    match (a.sign(), b.sign()) {
        (Sign::NoSign, Sign::NoSign) => Ordering::Equal,
        (Sign::Plus | Sign::NoSign, Sign::Plus | Sign::NoSign) => Ordering::Greater,
        (Sign::Minus | Sign::NoSign, Sign::Minus | Sign::NoSign) => Ordering::Less,
        (Sign::Plus, Sign::Minus) => {
            // a > 0 > b: positive iff a^2 > d b^2 (equality impossible for non-square d)
            if a * a > b * b * BigInt::from(d) {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        }
        (Sign::Minus, Sign::Plus) => {
            if a * a > b * b * BigInt::from(d) {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
    }
}

/// Sign of `a + b*sqrt(d)` with rational coefficients.
pub fn surd_sign_rat(a: &Rational, b: &Rational, d: u64) -> Ordering {
    let l = a.denom().lcm(b.denom());
    let ai = a.numer() * (&l / a.denom());
    let bi = b.numer() * (&l / b.denom());
    surd_sign(&ai, &bi, d)
}

/// `floor(n * sqrt(d))` for non-square `d`.
pub fn floor_mul_sqrt(n: &BigInt, d: u64) -> BigInt {
    let r = (n * n * BigInt::from(d)).sqrt();
    if n.is_negative() {
        -(r + 1u32)
    } else {
        r
    }
}

pub fn floor_rat(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil_rat(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// Rounds `x` to `digits` decimals (half away from zero) and prints it.
pub fn rational_to_decimal(x: &Rational, digits: u32) -> String {
    SurdValue::rational(x.clone()).to_decimal(digits)
}

/// A real number `a + b*sqrt(d)` with rational `a`, `b`. Used for exact
/// measures of thickened sets and for printing quadratic integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurdValue {
    pub a: Rational,
    pub b: Rational,
    pub d: u64,
}

impl SurdValue {
    pub fn rational(a: Rational) -> Self {
        SurdValue {
            a,
            b: Rational::zero(),
            d: 2,
        }
    }

    pub fn from_quad(x: &QuadInt) -> Self {
        SurdValue {
            a: int_rat(x.m().clone()),
            b: int_rat(x.n().clone()),
            d: x.radicand(),
        }
    }

    fn unify(&self, other: &Self) -> u64 {
        if self.b.is_zero() {
            other.d
        } else {
            debug_assert!(other.b.is_zero() || other.d == self.d);
            self.d
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        SurdValue {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
            d: self.unify(o),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        SurdValue {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
            d: self.unify(o),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        SurdValue {
            a: &self.a * k,
            b: &self.b * k,
            d: self.d,
        }
    }

    pub fn sign(&self) -> Ordering {
        surd_sign_rat(&self.a, &self.b, self.d)
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Ordering::Less {
            self.scale(&-Rational::one())
        } else {
            self.clone()
        }
    }

    pub fn cmp_value(&self, o: &Self) -> Ordering {
        self.sub(o).sign()
    }

    /// `floor` of the value.
    pub fn floor(&self) -> BigInt {
        let q = self.a.denom().lcm(self.b.denom());
        let alpha = self.a.numer() * (&q / self.a.denom());
        let beta = self.b.numer() * (&q / self.b.denom());
        let whole = alpha + floor_mul_sqrt(&beta, self.d);
        whole.div_floor(&q)
    }

    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        let neg = self.sign() == Ordering::Less;
        let mag = self.abs().scale(&int_rat(scale.clone()));
        let rounded = mag.add(&SurdValue::rational(rat(1, 2))).floor();
        let (int_part, frac) = rounded.div_rem(&scale);
        let sign = if neg && !rounded.is_zero() { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!(
                "{sign}{int_part}.{:0>width$}",
                frac.to_string(),
                width = digits as usize
            )
        }
    }
}

impl fmt::Display for SurdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(12))
    }
}

pub(crate) fn is_square_free(d: u64) -> bool {
    let mut k = 2u64;
    while k * k <= d {
        if d.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= p {
        if p.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rejects_decimals() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational(" -7 ").unwrap(), rat(-7, 1));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn surd_signs() {
        let b = |x: i64| BigInt::from(x);
        assert_eq!(surd_sign(&b(1), &b(-1), 2), Ordering::Less);
        assert_eq!(surd_sign(&b(3), &b(-2), 2), Ordering::Greater);
        assert_eq!(surd_sign(&b(-3), &b(2), 2), Ordering::Less);
        assert_eq!(surd_sign(&b(0), &b(0), 2), Ordering::Equal);
        assert_eq!(surd_sign(&b(0), &b(-1), 5), Ordering::Less);
    }

    #[test]
    fn floor_of_multiples_of_sqrt() {
        assert_eq!(floor_mul_sqrt(&BigInt::from(1), 2), BigInt::from(1));
        assert_eq!(floor_mul_sqrt(&BigInt::from(-1), 2), BigInt::from(-2));
        assert_eq!(floor_mul_sqrt(&BigInt::from(10), 3), BigInt::from(17));
    }

    #[test]
    fn decimals() {
        assert_eq!(rational_to_decimal(&rat(1, 3), 4), "0.3333");
        assert_eq!(rational_to_decimal(&rat(-2, 3), 3), "-0.667");
        assert_eq!(rational_to_decimal(&rat(5, 1), 2), "5.00");
        let sqrt2 = SurdValue {
            a: rat(0, 1),
            b: rat(1, 1),
            d: 2,
        };
        assert_eq!(sqrt2.to_decimal(12), "1.414213562373");
        assert_eq!(sqrt2.scale(&rat(-1, 1)).to_decimal(3), "-1.414");
    }

    #[test]
    fn square_free_and_prime() {
        assert!(is_square_free(2) && is_square_free(30) && !is_square_free(12));
        assert!(is_prime(2) && is_prime(97) && !is_prime(1) && !is_prime(91));
    }
}
