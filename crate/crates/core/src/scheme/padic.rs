use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, RngCore};
use rayon::prelude::*;

use super::{PointSet, Scheme, SchemeKind};
use crate::error::{Error, Result};
use crate::exactnum::{
    ceil_rat, floor_rat, format_rational, int_rat, PadicRat, Prime, Rational, SurdValue,
};

/// `Lambda_p = { g in Z[1/p] : |g|_inf <= w }` inside `G = Q_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct PadicScheme {
    p: Prime,
    w: Rational,
    closed: bool,
}

/// The ball `center + p^{-level} Z_p`, of Haar measure `p^level`.
#[derive(Clone, Debug, PartialEq)]
pub struct PadicRegion {
    pub center: PadicRat,
    pub level: i64,
}

/// A `p`-adic distance `p^k`, or zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PadicNorm {
    Zero,
    Pow(i64),
}

impl fmt::Display for PadicNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PadicNorm::Zero => f.write_str("zero"),
            PadicNorm::Pow(k) => write!(f, "level {k}"),
        }
    }
}

impl PadicScheme {
    pub fn new(p: u64, w: Rational, closed: bool) -> Result<Self> {
        let p = Prime::new(p)?;
        if !w.is_positive() {
            return Err(Error::usage(format!(
                "window bound must be positive, got {}",
                format_rational(&w)
            )));
        }
        Ok(PadicScheme { p, w, closed })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn point(&self, a: i64, k: u32) -> PadicRat {
        PadicRat::new(a, k, self.p)
    }

    /// The Følner ball `F_n = p^{-n} Z_p`.
    pub fn level_ball(&self, n: i64) -> PadicRegion {
        PadicRegion {
            center: PadicRat::zero(self.p),
            level: n,
        }
    }

    /// `p^{-level}`: the spacing of `Z[1/p]` inside a ball of that level.
    fn step(&self, level: i64) -> Rational {
        let pb = BigInt::from(self.p.get());
        let e = level.unsigned_abs() as u32;
        if level >= 0 {
            Rational::new(BigInt::from(1), pb.pow(e))
        } else {
            int_rat(pb.pow(e))
        }
    }

    fn p_pow(&self, level: i64) -> Rational {
        self.step(-level)
    }

    /// `center + a * p^{-level}` as a ring element.
    fn offset(&self, center: &PadicRat, a: BigInt, level: i64) -> PadicRat {
        let e = level.unsigned_abs() as u32;
        let off = if level >= 0 {
            PadicRat::new(a, e, self.p)
        } else {
            PadicRat::integer(a * self.p.pow(e), self.p)
        };
        &off + center
    }

    fn a_range(&self, region: &PadicRegion, bound: &Rational, closed: bool) -> (BigInt, BigInt) {
        let step = self.step(region.level);
        let c = region.center.value();
        let lo = (-bound - &c) / &step;
        let hi = (bound - &c) / &step;
        if closed {
            (ceil_rat(&lo), floor_rat(&hi))
        } else {
            (floor_rat(&lo) + 1, ceil_rat(&hi) - 1)
        }
    }

    /// `(x - center) * p^level`, an integer for `x` in the region.
    fn ball_coordinate(&self, region: &PadicRegion, x: &PadicRat) -> BigInt {
        ((x - &region.center).value() * self.p_pow(region.level)).to_integer()
    }

    fn max_arch(&self, set: &PointSet<Self>) -> Rational {
        let pts = set.points();
        match (pts.first(), pts.last()) {
            (Some(a), Some(b)) => a.arch_abs().max(b.arch_abs()),
            _ => Rational::zero(),
        }
    }
}

impl Scheme for PadicScheme {
    type Point = PadicRat;
    type Region = PadicRegion;
    type Dist = PadicNorm;
    type Radius = i64;

    fn kind(&self) -> SchemeKind {
        SchemeKind::Padic
    }

    fn window(&self) -> &Rational {
        &self.w
    }

    fn window_closed(&self) -> bool {
        self.closed
    }

    fn with_window(&self, w: Rational, closed: bool) -> Self {
        PadicScheme { p: self.p, w, closed }
    }

    fn zero(&self) -> PadicRat {
        PadicRat::zero(self.p)
    }

    fn from_int(&self, k: i64) -> PadicRat {
        PadicRat::integer(k, self.p)
    }

    fn add(&self, x: &PadicRat, y: &PadicRat) -> PadicRat {
        x + y
    }

    fn sub(&self, x: &PadicRat, y: &PadicRat) -> PadicRat {
        x - y
    }

    fn neg(&self, x: &PadicRat) -> PadicRat {
        -x
    }

    fn mul(&self, x: &PadicRat, y: &PadicRat) -> PadicRat {
        x * y
    }

    fn scale(&self, x: &PadicRat, k: &BigInt) -> PadicRat {
        x.scale(k)
    }

    fn abs(&self, x: &PadicRat) -> PadicRat {
        x.abs()
    }

    fn star_within(&self, x: &PadicRat, bound: &Rational, strict: bool) -> bool {
        let a = x.arch_abs();
        if strict {
            &a < bound
        } else {
            &a <= bound
        }
    }

    fn cmp_star_abs(&self, x: &PadicRat, y: &PadicRat) -> Ordering {
        x.arch_abs().cmp(&y.arch_abs())
    }

    fn star_abs_value(&self, x: &PadicRat) -> SurdValue {
        SurdValue::rational(x.arch_abs())
    }

    fn ball(&self, center: &PadicRat, radius: &i64) -> PadicRegion {
        PadicRegion {
            center: center.clone(),
            level: *radius,
        }
    }

    fn region_center(&self, region: &PadicRegion) -> PadicRat {
        region.center.clone()
    }

    fn region_radius(&self, region: &PadicRegion) -> i64 {
        region.level
    }

    fn in_region(&self, region: &PadicRegion, x: &PadicRat) -> bool {
        match (x - &region.center).level() {
            None => true,
            Some(l) => l <= region.level,
        }
    }

    fn measure(&self, region: &PadicRegion) -> Rational {
        self.p_pow(region.level)
    }

    // Balls are subgroups: a ball is closed under adding anything of
    // smaller level, so shrinking never removes points.
    fn shrink(&self, region: &PadicRegion, margin: &i64) -> Option<PadicRegion> {
        (*margin <= region.level).then(|| region.clone())
    }

    fn grow(&self, region: &PadicRegion, by: &i64) -> PadicRegion {
        PadicRegion {
            center: region.center.clone(),
            level: region.level.max(*by),
        }
    }

    fn region_within(&self, inner: &PadicRegion, outer: &PadicRegion, slack: &i64) -> bool {
        inner.level <= outer.level && *slack <= outer.level && self.in_region(outer, &inner.center)
    }

    fn count_estimate(&self, region: &PadicRegion) -> BigInt {
        let (lo, hi) = self.a_range(region, &self.w, self.closed);
        (hi - lo + 1u32).max(BigInt::zero())
    }

    fn enumerate_points(&self, region: &PadicRegion) -> Vec<PadicRat> {
        let (lo, hi) = self.a_range(region, &self.w, self.closed);
        if lo > hi {
            return Vec::new();
        }
        let lo = lo.to_i64().expect("range checked against the point cap");
        let hi = hi.to_i64().expect("range checked against the point cap");
        (lo..=hi)
            .into_par_iter()
            .map(|a| self.offset(&region.center, BigInt::from(a), region.level))
            .collect()
    }

    fn dist(&self, x: &PadicRat, y: &PadicRat) -> PadicNorm {
        match (x - y).level() {
            None => PadicNorm::Zero,
            Some(l) => PadicNorm::Pow(l),
        }
    }

    fn dist_within(&self, d: &PadicNorm, r: &i64) -> bool {
        *d <= PadicNorm::Pow(*r)
    }

    fn radius_of(&self, d: &PadicNorm) -> i64 {
        match d {
            PadicNorm::Zero => i64::MIN,
            PadicNorm::Pow(l) => *l,
        }
    }

    fn radius_add(&self, a: &i64, b: &i64) -> i64 {
        *a.max(b)
    }

    fn radius_zero(&self) -> i64 {
        i64::MIN
    }

    fn cmp_radius(&self, a: &i64, b: &i64) -> Ordering {
        a.cmp(b)
    }

    fn dist_decimal(&self, d: &PadicNorm) -> String {
        match d {
            PadicNorm::Zero => "0".to_string(),
            PadicNorm::Pow(l) => SurdValue::rational(self.p_pow(*l)).to_decimal(12),
        }
    }

    fn dist_exact(&self, d: &PadicNorm) -> String {
        match d {
            PadicNorm::Zero => "zero".to_string(),
            PadicNorm::Pow(l) => l.to_string(),
        }
    }

    fn separating_radius(&self, gap: &PadicNorm) -> i64 {
        match gap {
            PadicNorm::Zero => i64::MAX,
            PadicNorm::Pow(l) => l - 1,
        }
    }

    fn gap_separated(&self, gap: &PadicNorm, v: &i64) -> bool {
        *gap > PadicNorm::Pow(*v)
    }

    fn ball_points(&self, set: &PointSet<Self>, center: &PadicRat, radius: &i64) -> Vec<PadicRat> {
        if set.is_empty() {
            return Vec::new();
        }
        let region = self.ball(center, radius);
        let bound = self.max_arch(set);
        let (lo, hi) = self.a_range(&region, &bound, true);
        let probes = (&hi - &lo + 1u32).max(BigInt::zero());
        if probes > BigInt::from(set.len()) {
            return set
                .iter()
                .filter(|x| self.in_region(&region, x))
                .cloned()
                .collect();
        }
        let mut out = Vec::new();
        let mut a = lo;
        while a <= hi {
            let y = self.offset(center, a.clone(), *radius);
            if set.contains(&y) {
                out.push(y);
            }
            a += 1;
        }
        out
    }

    fn nearest(&self, set: &PointSet<Self>, x: &PadicRat) -> Option<(PadicNorm, Vec<PadicRat>)> {
        if set.is_empty() {
            return None;
        }
        if set.contains(x) {
            return Some((PadicNorm::Zero, vec![x.clone()]));
        }
        // a nonzero element of p^L Z has |.|_inf >= p^L, so balls of level -L
        // with p^L beyond every |y - x|_inf hold no point of the set
        let reach = self.max_arch(set) + x.arch_abs();
        let pb = int_rat(BigInt::from(self.p.get()));
        let mut level = 0i64;
        let mut pw = int_rat(1);
        while pw <= reach {
            pw *= &pb;
            level -= 1;
        }
        loop {
            let found = self.ball_points(set, x, &level);
            if !found.is_empty() {
                return Some((PadicNorm::Pow(level), found));
            }
            level += 1;
        }
    }

    fn min_gap(&self, sorted: &[PadicRat]) -> Option<PadicNorm> {
        if sorted.len() < 2 {
            return None;
        }
        let k = sorted.iter().map(|x| x.exponent()).max().unwrap_or(0);
        let lifted: Vec<BigInt> = sorted.iter().map(|x| x.lifted(k)).collect();
        let pb = BigInt::from(self.p.get());
        // largest e with two lifted numerators congruent mod p^e
        let mut e = 0u32;
        let mut modulus = pb.clone();
        loop {
            let mut seen = HashSet::with_capacity(lifted.len());
            let collide = lifted.iter().any(|a| !seen.insert(a.mod_floor(&modulus)));
            if !collide {
                break;
            }
            e += 1;
            modulus *= &pb;
        }
        Some(PadicNorm::Pow(i64::from(k) - i64::from(e)))
    }

    fn covering(&self, set: &PointSet<Self>, region: &PadicRegion) -> Option<PadicNorm> {
        let coords: Vec<BigInt> = set
            .iter()
            .filter(|x| self.in_region(region, x))
            .map(|x| self.ball_coordinate(region, x))
            .collect();
        if coords.is_empty() {
            return None;
        }
        let pb = BigInt::from(self.p.get());
        let mut level = region.level;
        let mut modulus = pb.clone();
        // every sub-ball of level `level - 1` is hit iff all residues mod p^(n - level + 1) occur
        while modulus <= BigInt::from(coords.len()) {
            let hit: HashSet<BigInt> = coords.iter().map(|a| a.mod_floor(&modulus)).collect();
            if BigInt::from(hit.len()) != modulus {
                break;
            }
            level -= 1;
            modulus *= &pb;
        }
        Some(PadicNorm::Pow(level))
    }

    fn max_window(
        &self,
        set: &PointSet<Self>,
        ambient: &PadicRegion,
        extent: &i64,
    ) -> Option<(usize, Rational)> {
        if *extent > ambient.level {
            return None;
        }
        let modulus = self.p.pow((ambient.level - extent) as u32);
        let mut counts: HashMap<BigInt, usize> = HashMap::new();
        for x in set.iter().filter(|x| self.in_region(ambient, x)) {
            *counts
                .entry(self.ball_coordinate(ambient, x).mod_floor(&modulus))
                .or_default() += 1;
        }
        let best = counts.values().copied().max().unwrap_or(0);
        Some((best, self.p_pow(*extent)))
    }

    fn sample_region(
        &self,
        rng: &mut dyn RngCore,
        ambient: &PadicRegion,
        max_extent: &i64,
    ) -> PadicRegion {
        let top = (*max_extent).min(ambient.level);
        let level = rng.gen_range(top - 4..=top);
        let (lo, hi) = self.a_range(ambient, &self.w, true);
        let (lo, hi) = (lo.to_i64().unwrap_or(0), hi.to_i64().unwrap_or(0));
        let a = if lo <= hi { rng.gen_range(lo..=hi) } else { 0 };
        PadicRegion {
            center: self.offset(&ambient.center, BigInt::from(a), ambient.level),
            level,
        }
    }

    fn thickening_measure(&self, set: &PointSet<Self>, region: &PadicRegion, v: &i64) -> SurdValue {
        let total: Rational = if *v <= region.level {
            let inside = set.iter().filter(|x| self.in_region(region, x)).count();
            self.p_pow(*v) * int_rat(inside)
        } else {
            let covering = set
                .iter()
                .any(|x| self.in_region(&self.ball(x, v), &region.center));
            if covering {
                self.measure(region)
            } else {
                Rational::zero()
            }
        };
        SurdValue::rational(total)
    }

    fn coords(&self, x: &PadicRat) -> (BigInt, BigInt) {
        (x.numerator().clone(), BigInt::from(x.exponent()))
    }

    fn from_coords(&self, a: BigInt, k: BigInt) -> Result<PadicRat> {
        let k = k
            .to_u32()
            .ok_or_else(|| Error::usage(format!("exponent {k} must be a non-negative u32")))?;
        Ok(PadicRat::new(a, k, self.p))
    }

    fn parse_radius(&self, s: &str) -> Result<i64> {
        s.trim()
            .parse()
            .map_err(|_| Error::usage(format!("ball level must be an integer, got {s:?}")))
    }

    fn region_label(&self, region: &PadicRegion) -> String {
        format!(
            "{} + {}^-{} Z_{}",
            region.center,
            self.p.get(),
            region.level,
            self.p.get()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::scheme::enumerate;

    fn lam2() -> PadicScheme {
        PadicScheme::new(2, rat(1, 1), true).unwrap()
    }

    #[test]
    fn level_three_has_seventeen_points() {
        let s = lam2();
        let set = enumerate(&s, &s.level_ball(3), 1000).unwrap();
        assert_eq!(set.len(), 17);
        let expect: Vec<_> = (-8..=8).map(|k| s.point(k, 3)).collect();
        assert_eq!(set.points(), expect.as_slice());
    }

    #[test]
    fn count_law() {
        for p in [2u64, 3, 5] {
            let s = PadicScheme::new(p, rat(1, 1), true).unwrap();
            for n in 0..6 {
                let set = enumerate(&s, &s.level_ball(n), 1_000_000).unwrap();
                assert_eq!(set.len() as u64, 2 * p.pow(n as u32) + 1);
            }
        }
        // open window drops the two endpoints
        let open = PadicScheme::new(3, rat(1, 1), false).unwrap();
        assert_eq!(enumerate(&open, &open.level_ball(2), 100).unwrap().len(), 17);
    }

    #[test]
    fn translated_ball() {
        let s = lam2();
        // the ball 1/8 + Z_2 : points 1/8 + j with |.| <= 1
        let region = PadicRegion {
            center: s.point(1, 3),
            level: 0,
        };
        let set = enumerate(&s, &region, 100).unwrap();
        let expect = vec![s.point(-7, 3), s.point(1, 3)];
        assert_eq!(set.points(), expect.as_slice());
        assert_eq!(s.measure(&region), s.measure(&s.level_ball(0)));
    }

    #[test]
    fn gaps_and_covering() {
        let s = lam2();
        let region = s.level_ball(4);
        let set = enumerate(&s, &region, 1000).unwrap();
        // a in [-16, 16]: differences up to 32 = 2^5, so smallest distance 2^(4 - 5)
        assert_eq!(s.min_gap(set.points()), Some(PadicNorm::Pow(-1)));
        // 33 consecutive numerators hit every residue mod 32, not mod 64
        assert_eq!(s.covering(&set, &region), Some(PadicNorm::Pow(-1)));
    }

    #[test]
    fn nearest_and_ball_points() {
        let s = lam2();
        let set = enumerate(&s, &s.level_ball(2), 1000).unwrap();
        let x = s.point(1, 3);
        let (d, at) = s.nearest(&set, &x).unwrap();
        assert_eq!(d, PadicNorm::Pow(3));
        let brute = set.iter().map(|y| s.dist(y, &x)).min().unwrap();
        assert_eq!(d, brute);
        assert!(at.iter().all(|y| s.dist(y, &x) == d));
        let ball = s.ball_points(&set, &s.zero(), &0);
        assert_eq!(ball, vec![s.point(-1, 0), s.zero(), s.point(1, 0)]);
    }

    #[test]
    fn banach_window_groups() {
        let s = lam2();
        let region = s.level_ball(3);
        let set = enumerate(&s, &region, 1000).unwrap();
        let (count, m) = s.max_window(&set, &region, &3).unwrap();
        assert_eq!((count, m), (17, rat(8, 1)));
        let (count, m) = s.max_window(&set, &region, &0).unwrap();
        assert_eq!(m, rat(1, 1));
        // residue 0 mod 8 among a in [-8, 8]: -8, 0, 8
        assert_eq!(count, 3);
    }
}
