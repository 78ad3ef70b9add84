use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{is_prime, Rational};
use crate::error::ArithError;

/// A validated prime below `2^32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, ArithError> {
        if p < (1 << 32) && is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(ArithError::InvalidPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn pow(self, e: u32) -> BigInt {
        BigInt::from(self.0).pow(e)
    }
}

/// `p`-adic valuation; `Infinite` is the valuation of zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

/// An element `a / p^k` of `Z[1/p]`.
///
/// Canonical form: `k == 0`, or `p` does not divide `a`. Integers keep their
/// factors of `p` in `a` (so `8` with `p = 2` is stored as `(8, 0)`); the
/// valuation is computed on demand.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicRat {
    a: BigInt,
    k: u32,
    p: u64,
}

impl PadicRat {
    pub fn new(a: impl Into<BigInt>, k: u32, p: Prime) -> Self {
        Self::canonical(a.into(), k, p.0)
    }

    pub fn integer(a: impl Into<BigInt>, p: Prime) -> Self {
        Self::new(a, 0, p)
    }

    pub fn zero(p: Prime) -> Self {
        Self::new(0, 0, p)
    }

    /// `r` as an element of `Z[1/p]`, if its denominator is a power of `p`.
    pub fn from_rational(r: &Rational, p: Prime) -> Option<Self> {
        let mut den = r.denom().clone();
        let pb = BigInt::from(p.0);
        let mut k = 0u32;
        while !den.is_one_value() {
            let (q, rem) = den.div_rem(&pb);
            if !rem.is_zero() {
                return None;
            }
            den = q;
            k += 1;
        }
        Some(Self::new(r.numer().clone(), k, p))
    }

    fn canonical(mut a: BigInt, mut k: u32, p: u64) -> Self {
        if a.is_zero() {
            return PadicRat { a, k: 0, p };
        }
        let pb = BigInt::from(p);
        while k > 0 {
            let (q, r) = a.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            a = q;
            k -= 1;
        }
        PadicRat { a, k, p }
    }

    pub(crate) fn is_canonical(&self) -> bool {
        if self.a.is_zero() {
            return self.k == 0;
        }
        self.k == 0 || !(&self.a % BigInt::from(self.p)).is_zero()
    }

    pub fn numerator(&self) -> &BigInt {
        &self.a
    }

    pub fn exponent(&self) -> u32 {
        self.k
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero()
    }

    fn same_ring(&self, other: &Self) -> Result<(), ArithError> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(ArithError::PrimeMismatch(self.p, other.p))
        }
    }

    /// Numerator of `self` over the denominator `p^k` with `k >= self.k`.
    pub(crate) fn lifted(&self, k: u32) -> BigInt {
        debug_assert!(k >= self.k);
        &self.a * BigInt::from(self.p).pow(k - self.k)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ArithError> {
        self.same_ring(other)?;
        let k = self.k.max(other.k);
        let out = Self::canonical(self.lifted(k) + other.lifted(k), k, self.p);
        debug_assert!(out.is_canonical());
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ArithError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ArithError> {
        self.same_ring(other)?;
        let out = Self::canonical(&self.a * &other.a, self.k + other.k, self.p);
        debug_assert!(out.is_canonical());
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::canonical(&self.a * c, self.k, self.p)
    }

    /// `v_p(a) - k`, found by trial division.
    pub fn valuation(&self) -> Valuation {
        if self.a.is_zero() {
            return Valuation::Infinite;
        }
        Valuation::Finite(i64::from(v_p(&self.a, self.p)) - i64::from(self.k))
    }

    /// `|x|_p = p^level`; `None` for zero.
    pub fn level(&self) -> Option<i64> {
        match self.valuation() {
            Valuation::Finite(v) => Some(-v),
            Valuation::Infinite => None,
        }
    }

    pub fn value(&self) -> Rational {
        Rational::new(self.a.clone(), BigInt::from(self.p).pow(self.k))
    }

    /// The real absolute value `|x|_inf`.
    pub fn arch_abs(&self) -> Rational {
        Rational::new(self.a.abs(), BigInt::from(self.p).pow(self.k))
    }

    pub fn abs(&self) -> Self {
        PadicRat {
            a: self.a.abs(),
            k: self.k,
            p: self.p,
        }
    }
}

/// Exponent of `p` in the nonzero integer `a`.
pub(crate) fn v_p(a: &BigInt, p: u64) -> u32 {
    debug_assert!(!a.is_zero());
    let pb = BigInt::from(p);
    let mut a = a.clone();
    let mut v = 0;
    loop {
        let (q, r) = a.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        a = q;
        v += 1;
    }
}

trait IsOne {
    fn is_one_value(&self) -> bool;
}

impl IsOne for BigInt {
    fn is_one_value(&self) -> bool {
        *self == BigInt::from(1)
    }
}

impl PartialOrd for PadicRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PadicRat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.p.cmp(&other.p).then_with(|| {
            let k = self.k.max(other.k);
            self.lifted(k).cmp(&other.lifted(k))
        })
    }
}

impl fmt::Debug for PadicRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}^{}", self.a, self.p, self.k)
    }
}

impl fmt::Display for PadicRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a, self.k)
    }
}

impl Add for &PadicRat {
    type Output = PadicRat;
    fn add(self, rhs: &PadicRat) -> PadicRat {
        self.checked_add(rhs).expect("p-adic rationals for different primes")
    }
}

impl Sub for &PadicRat {
    type Output = PadicRat;
    fn sub(self, rhs: &PadicRat) -> PadicRat {
        self.checked_sub(rhs).expect("p-adic rationals for different primes")
    }
}

impl Mul for &PadicRat {
    type Output = PadicRat;
    fn mul(self, rhs: &PadicRat) -> PadicRat {
        self.checked_mul(rhs).expect("p-adic rationals for different primes")
    }
}

impl Neg for &PadicRat {
    type Output = PadicRat;
    fn neg(self) -> PadicRat {
        PadicRat {
            a: -&self.a,
            k: self.k,
            p: self.p,
        }
    }
}

impl Neg for PadicRat {
    type Output = PadicRat;
    fn neg(self) -> PadicRat {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn two() -> Prime {
        Prime::new(2).unwrap()
    }

    fn x(a: i64, k: u32) -> PadicRat {
        PadicRat::new(a, k, two())
    }

    #[test]
    fn prime_validation() {
        assert!(Prime::new(2).is_ok() && Prime::new(7).is_ok());
        assert!(Prime::new(1).is_err() && Prime::new(9).is_err());
    }

    #[test]
    fn canonical_sums() {
        assert_eq!(&x(1, 1) + &x(1, 1), x(1, 0));
        assert_eq!(x(1, 0).exponent(), 0);
        assert_eq!(&x(3, 2) + &x(1, 2), x(1, 0));
        assert_eq!(&x(3, 2) + &x(-3, 2), PadicRat::zero(two()));
        assert_eq!((&x(3, 2) + &x(-3, 2)).exponent(), 0);
        assert_eq!(&x(5, 3) * &x(1, 0), x(5, 3));
        assert_eq!(&x(3, 1) * &x(2, 0), x(3, 0));
        let three = PadicRat::new(1, 1, Prime::new(3).unwrap());
        assert_eq!(
            x(1, 1).checked_add(&three),
            Err(ArithError::PrimeMismatch(2, 3))
        );
    }

    #[test]
    fn integers_keep_prime_factors() {
        let eight = x(8, 0);
        assert_eq!(eight.numerator(), &BigInt::from(8));
        assert_eq!(eight.exponent(), 0);
        assert_eq!(eight.valuation(), Valuation::Finite(3));
    }

    #[test]
    fn valuations_and_abs() {
        assert_eq!(PadicRat::zero(two()).valuation(), Valuation::Infinite);
        assert_eq!(x(3, 2).valuation(), Valuation::Finite(-2));
        assert_eq!(x(3, 2).arch_abs(), rat(3, 4));
        assert_eq!(x(-3, 2).arch_abs(), rat(3, 4));
        assert_eq!(x(12, 0).level(), Some(-2));
        assert!(Valuation::Finite(100) < Valuation::Infinite);
    }

    #[test]
    fn from_rational_and_order() {
        assert_eq!(PadicRat::from_rational(&rat(6, 8), two()), Some(x(3, 2)));
        assert_eq!(PadicRat::from_rational(&rat(1, 3), two()), None);
        assert!(x(1, 2) < x(1, 1));
        assert!(x(-1, 0) < x(-3, 2));
    }
}
