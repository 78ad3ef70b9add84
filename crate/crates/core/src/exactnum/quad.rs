use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::Zero;

use super::{floor_mul_sqrt, is_square_free, surd_sign, Rational};
use crate::error::ArithError;

/// A validated radicand: square-free and in `[2, 10^6]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Radicand(u64);

impl Radicand {
    pub const MAX: u64 = 1_000_000;

    pub fn new(d: u64) -> Result<Self, ArithError> {
        if (2..=Self::MAX).contains(&d) && is_square_free(d) {
            Ok(Radicand(d))
        } else {
            Err(ArithError::InvalidRadicand(d))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

/// The quadratic integer `m + n*sqrt(D)`.
///
/// Since `sqrt(D)` is irrational the pair `(m, n)` is unique, so equality and
/// hashing are componentwise. The total order is the order of real values
/// (elements with different radicands order by radicand first).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadInt {
    m: BigInt,
    n: BigInt,
    d: u64,
}

impl QuadInt {
    pub fn new(m: impl Into<BigInt>, n: impl Into<BigInt>, d: Radicand) -> Self {
        QuadInt {
            m: m.into(),
            n: n.into(),
            d: d.0,
        }
    }

    pub(crate) fn raw(m: BigInt, n: BigInt, d: u64) -> Self {
        QuadInt { m, n, d }
    }

    pub fn zero(d: Radicand) -> Self {
        Self::new(0, 0, d)
    }

    pub fn m(&self) -> &BigInt {
        &self.m
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero() && self.n.is_zero()
    }

    fn same_ring(&self, other: &Self) -> Result<(), ArithError> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(ArithError::RadicandMismatch(self.d, other.d))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ArithError> {
        self.same_ring(other)?;
        Ok(Self::raw(&self.m + &other.m, &self.n + &other.n, self.d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ArithError> {
        self.same_ring(other)?;
        Ok(Self::raw(&self.m - &other.m, &self.n - &other.n, self.d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ArithError> {
        self.same_ring(other)?;
        let d = BigInt::from(self.d);
        Ok(Self::raw(
            &self.m * &other.m + d * &self.n * &other.n,
            &self.m * &other.n + &self.n * &other.m,
            self.d,
        ))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::raw(&self.m * k, &self.n * k, self.d)
    }

    /// Galois conjugate `m - n*sqrt(D)`: the internal-space image.
    pub fn star(&self) -> Self {
        Self::raw(self.m.clone(), -&self.n, self.d)
    }

    /// Field norm `m^2 - D n^2`.
    pub fn norm(&self) -> BigInt {
        &self.m * &self.m - BigInt::from(self.d) * &self.n * &self.n
    }

    pub fn signum(&self) -> Ordering {
        surd_sign(&self.m, &self.n, self.d)
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    fn bound_signs(&self, r: &Rational) -> (Ordering, Ordering) {
        let (num, den) = (r.numer(), r.denom());
        let md = &self.m * den;
        let nd = &self.n * den;
        // r - x and r + x, scaled by den > 0
        let upper = surd_sign(&(num - &md), &(-&nd), self.d);
        let lower = surd_sign(&(num + &md), &nd, self.d);
        (upper, lower)
    }

    /// Sign of `x - r`.
    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        let (num, den) = (r.numer(), r.denom());
        surd_sign(&(&self.m * den - num), &(&self.n * den), self.d)
    }

    /// `|x| <= r`, decided exactly.
    pub fn abs_le(&self, r: &Rational) -> bool {
        let (u, l) = self.bound_signs(r);
        u != Ordering::Less && l != Ordering::Less
    }

    /// `|x| < r`, decided exactly.
    pub fn abs_lt(&self, r: &Rational) -> bool {
        let (u, l) = self.bound_signs(r);
        u == Ordering::Greater && l == Ordering::Greater
    }

    /// `floor(x)` as an integer.
    pub fn floor(&self) -> BigInt {
        &self.m + floor_mul_sqrt(&self.n, self.d)
    }

    /// `ceil(x)` as an integer.
    pub fn ceil(&self) -> BigInt {
        if self.n.is_zero() {
            self.m.clone()
        } else {
            self.floor() + 1
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }
}

impl PartialOrd for QuadInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadInt {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d.cmp(&other.d).then_with(|| {
            surd_sign(&(&self.m - &other.m), &(&self.n - &other.n), self.d)
        })
    }
}

impl fmt::Debug for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}√{})", self.m, self.n, self.d)
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.m, self.n)
    }
}

// Operator forms panic on mismatched radicands; schemes never mix rings.
impl Add for &QuadInt {
    type Output = QuadInt;
    fn add(self, rhs: &QuadInt) -> QuadInt {
        self.checked_add(rhs).expect("quadratic integers from different rings")
    }
}

impl Sub for &QuadInt {
    type Output = QuadInt;
    fn sub(self, rhs: &QuadInt) -> QuadInt {
        self.checked_sub(rhs).expect("quadratic integers from different rings")
    }
}

impl Mul for &QuadInt {
    type Output = QuadInt;
    fn mul(self, rhs: &QuadInt) -> QuadInt {
        self.checked_mul(rhs).expect("quadratic integers from different rings")
    }
}

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt::raw(-&self.m, -&self.n, self.d)
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        -&self
    }
}
