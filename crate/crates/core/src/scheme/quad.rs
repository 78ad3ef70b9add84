use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, RngCore};
use rayon::prelude::*;

use super::{PointSet, Scheme, SchemeKind};
use crate::error::{Error, Result};
use crate::exactnum::{
    ceil_rat, floor_mul_sqrt, floor_rat, format_rational, int_rat, parse_rational, QuadInt,
    Radicand, Rational, SurdValue,
};

/// `Lambda = { x in Z[sqrt D] : |x*| <= w }` (or `< w` for an open window).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadScheme {
    d: Radicand,
    w: Rational,
    closed: bool,
}

/// The interval `[center - half, center + half]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadRegion {
    pub center: QuadInt,
    pub half: Rational,
}

impl QuadScheme {
    pub fn new(d: u64, w: Rational, closed: bool) -> Result<Self> {
        let d = Radicand::new(d)?;
        if !w.is_positive() {
            return Err(Error::usage(format!(
                "window half-width must be positive, got {}",
                format_rational(&w)
            )));
        }
        Ok(QuadScheme { d, w, closed })
    }

    pub fn radicand(&self) -> Radicand {
        self.d
    }

    pub fn point(&self, m: i64, n: i64) -> QuadInt {
        QuadInt::new(m, n, self.d)
    }

    /// `[-half, half]`.
    pub fn interval(&self, half: Rational) -> QuadRegion {
        QuadRegion {
            center: QuadInt::zero(self.d),
            half,
        }
    }

    fn n_range(&self, region: &QuadRegion) -> (BigInt, BigInt) {
        // 2n*sqrt(D) = u - u*, with u within half of the center and |u*| <= w
        let cm = int_rat(region.center.m().clone());
        let spread = &region.half + &self.w;
        let (lo, _) = div_two_sqrt_bounds(&(&cm - &spread), self.d.get());
        let (_, hi) = div_two_sqrt_bounds(&(&cm + &spread), self.d.get());
        let cn = region.center.n();
        (cn.div_floor(&BigInt::from(2)) + lo - 1, cn.div_ceil(&BigInt::from(2)) + hi + 1)
    }

    fn points_in_row(&self, region: &QuadRegion, n: &BigInt) -> Vec<QuadInt> {
        let d = self.d.get();
        let wc = ceil_rat(&self.w);
        let tc = ceil_rat(&region.half);
        let f1 = floor_mul_sqrt(n, d);
        let f2 = floor_mul_sqrt(&(region.center.n() - n), d);
        let lo = (&f1 - &wc).max(region.center.m() - &tc + &f2);
        let hi = (&f1 + 1u32 + &wc).min(region.center.m() + &tc + &f2 + 1u32);
        let mut out = Vec::new();
        let mut m = lo;
        while m <= hi {
            let x = QuadInt::new(m.clone(), n.clone(), self.d);
            if self.star_within(&x, &self.w, !self.closed) && self.in_region(region, &x) {
                out.push(x);
            }
            m += 1;
        }
        out
    }
}

/// Integers `lo <= x / (2 sqrt d) <= hi`, one apart.
fn div_two_sqrt_bounds(x: &Rational, d: u64) -> (BigInt, BigInt) {
    let sq = x * x / int_rat(4 * d);
    let s = floor_rat(&sq).sqrt();
    if x.is_negative() {
        (-&s - 1, -s)
    } else {
        (s.clone(), s + 1)
    }
}

impl Scheme for QuadScheme {
    type Point = QuadInt;
    type Region = QuadRegion;
    type Dist = QuadInt;
    type Radius = Rational;

    fn kind(&self) -> SchemeKind {
        SchemeKind::Quadratic
    }

    fn window(&self) -> &Rational {
        &self.w
    }

    fn window_closed(&self) -> bool {
        self.closed
    }

    fn with_window(&self, w: Rational, closed: bool) -> Self {
        QuadScheme {
            d: self.d,
            w,
            closed,
        }
    }

    fn zero(&self) -> QuadInt {
        QuadInt::zero(self.d)
    }

    fn from_int(&self, k: i64) -> QuadInt {
        self.point(k, 0)
    }

    fn add(&self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        x + y
    }

    fn sub(&self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        x - y
    }

    fn neg(&self, x: &QuadInt) -> QuadInt {
        -x
    }

    fn mul(&self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        x * y
    }

    fn scale(&self, x: &QuadInt, k: &BigInt) -> QuadInt {
        x.scale(k)
    }

    fn abs(&self, x: &QuadInt) -> QuadInt {
        x.abs()
    }

    fn star_within(&self, x: &QuadInt, bound: &Rational, strict: bool) -> bool {
        let s = x.star();
        if strict {
            s.abs_lt(bound)
        } else {
            s.abs_le(bound)
        }
    }

    fn cmp_star_abs(&self, x: &QuadInt, y: &QuadInt) -> Ordering {
        x.star().abs().cmp(&y.star().abs())
    }

    fn star_abs_value(&self, x: &QuadInt) -> SurdValue {
        SurdValue::from_quad(&x.star().abs())
    }

    fn ball(&self, center: &QuadInt, radius: &Rational) -> QuadRegion {
        QuadRegion {
            center: center.clone(),
            half: radius.clone(),
        }
    }

    fn region_center(&self, region: &QuadRegion) -> QuadInt {
        region.center.clone()
    }

    fn region_radius(&self, region: &QuadRegion) -> Rational {
        region.half.clone()
    }

    fn in_region(&self, region: &QuadRegion, x: &QuadInt) -> bool {
        (x - &region.center).abs_le(&region.half)
    }

    fn measure(&self, region: &QuadRegion) -> Rational {
        &region.half * int_rat(2)
    }

    fn shrink(&self, region: &QuadRegion, margin: &Rational) -> Option<QuadRegion> {
        let half = &region.half - margin;
        (!half.is_negative()).then(|| QuadRegion {
            center: region.center.clone(),
            half,
        })
    }

    fn grow(&self, region: &QuadRegion, by: &Rational) -> QuadRegion {
        QuadRegion {
            center: region.center.clone(),
            half: &region.half + by,
        }
    }

    fn region_within(&self, inner: &QuadRegion, outer: &QuadRegion, slack: &Rational) -> bool {
        let room = &outer.half - &inner.half - slack;
        !room.is_negative() && (&inner.center - &outer.center).abs_le(&room)
    }

    fn count_estimate(&self, region: &QuadRegion) -> BigInt {
        let (lo, hi) = self.n_range(region);
        let rows = (hi - lo + 1u32).max(BigInt::zero());
        rows * (ceil_rat(&self.w) * 2 + 2)
    }

    fn enumerate_points(&self, region: &QuadRegion) -> Vec<QuadInt> {
        let (lo, hi) = self.n_range(region);
        let lo = lo.to_i64().expect("row range checked against the point cap");
        let hi = hi.to_i64().expect("row range checked against the point cap");
        (lo..=hi)
            .into_par_iter()
            .flat_map_iter(|n| self.points_in_row(region, &BigInt::from(n)))
            .collect()
    }

    fn dist(&self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        (x - y).abs()
    }

    fn dist_within(&self, d: &QuadInt, r: &Rational) -> bool {
        d.abs_le(r)
    }

    fn radius_of(&self, d: &QuadInt) -> Rational {
        int_rat(d.ceil())
    }

    fn radius_add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }

    fn radius_zero(&self) -> Rational {
        Rational::zero()
    }

    fn cmp_radius(&self, a: &Rational, b: &Rational) -> Ordering {
        a.cmp(b)
    }

    fn dist_decimal(&self, d: &QuadInt) -> String {
        SurdValue::from_quad(d).to_decimal(12)
    }

    fn dist_exact(&self, d: &QuadInt) -> String {
        let n = d.n();
        let sign = if n.is_negative() { '-' } else { '+' };
        format!("{}{}{}*sqrt({})", d.m(), sign, n.abs(), self.d.get())
    }

    fn separating_radius(&self, gap: &QuadInt) -> Rational {
        // largest multiple of 2^-21 not above gap / 2
        let scale = BigInt::from(1u64 << 20);
        let g = gap.scale(&scale).floor().max(BigInt::zero());
        Rational::new(g, scale * 2)
    }

    fn gap_separated(&self, gap: &QuadInt, v: &Rational) -> bool {
        gap.cmp_rational(&(v * int_rat(2))) != Ordering::Less
    }

    fn ball_points(
        &self,
        set: &PointSet<Self>,
        center: &QuadInt,
        radius: &Rational,
    ) -> Vec<QuadInt> {
        let pts = set.points();
        let lo = pts.partition_point(|p| p < center && !(center - p).abs_le(radius));
        let hi = pts.partition_point(|p| p <= center || (p - center).abs_le(radius));
        pts[lo..hi].to_vec()
    }

    fn nearest(&self, set: &PointSet<Self>, x: &QuadInt) -> Option<(QuadInt, Vec<QuadInt>)> {
        let pts = set.points();
        let i = pts.partition_point(|p| p < x);
        let mut best: Option<(QuadInt, Vec<QuadInt>)> = None;
        for p in pts[i.saturating_sub(1)..(i + 1).min(pts.len())].iter() {
            let d = self.dist(p, x);
            match &mut best {
                Some((bd, ws)) if *bd == d => ws.push(p.clone()),
                Some((bd, _)) if *bd < d => {}
                _ => best = Some((d, vec![p.clone()])),
            }
        }
        best
    }

    fn min_gap(&self, sorted: &[QuadInt]) -> Option<QuadInt> {
        sorted.windows(2).map(|w| &w[1] - &w[0]).min()
    }

    fn covering(&self, set: &PointSet<Self>, region: &QuadRegion) -> Option<QuadInt> {
        let inside: Vec<&QuadInt> = set.iter().filter(|x| self.in_region(region, x)).collect();
        inside.windows(2).map(|w| w[1] - w[0]).max()
    }

    fn max_window(
        &self,
        set: &PointSet<Self>,
        ambient: &QuadRegion,
        extent: &Rational,
    ) -> Option<(usize, Rational)> {
        let len = extent * int_rat(2);
        if len > self.measure(ambient) {
            return None;
        }
        let pts: Vec<&QuadInt> = set.iter().filter(|x| self.in_region(ambient, x)).collect();
        // windows [a, a + len] anchored at a point, plus the one flush with the right end
        let slack = &len - &ambient.half;
        let mut best = {
            let from = &ambient.half - &len;
            pts.iter()
                .filter(|p| (**p - &ambient.center).cmp_rational(&from) != Ordering::Less)
                .count()
        };
        let mut j = 0;
        for (i, a) in pts.iter().enumerate() {
            if (&ambient.center - *a).cmp_rational(&slack) == Ordering::Less {
                break;
            }
            j = j.max(i);
            while j < pts.len() && (pts[j] - *a).cmp_rational(&len) != Ordering::Greater {
                j += 1;
            }
            best = best.max(j - i);
        }
        Some((best, len))
    }

    fn sample_region(
        &self,
        rng: &mut dyn RngCore,
        ambient: &QuadRegion,
        max_extent: &Rational,
    ) -> QuadRegion {
        let steps = floor_rat(&(max_extent * int_rat(8))).to_i64().unwrap_or(8).max(1);
        let half = Rational::new(BigInt::from(rng.gen_range(1..=steps)), BigInt::from(8));
        let span = floor_rat(&(&ambient.half - &half)).to_i64().unwrap_or(0).max(0);
        let k = rng.gen_range(-span..=span);
        QuadRegion {
            center: &ambient.center + &self.from_int(k),
            half,
        }
    }

    fn thickening_measure(
        &self,
        set: &PointSet<Self>,
        region: &QuadRegion,
        v: &Rational,
    ) -> SurdValue {
        let two_v = v * int_rat(2);
        let inner = &region.half - v;
        let c = SurdValue::from_quad(&region.center);
        let lo_end = c.sub(&SurdValue::rational(region.half.clone()));
        let hi_end = c.add(&SurdValue::rational(region.half.clone()));
        let mut full = 0u64;
        let mut partial = SurdValue::rational(Rational::zero());
        for p in set.iter() {
            let off = p - &region.center;
            if !inner.is_negative() && off.abs_le(&inner) {
                full += 1;
                continue;
            }
            let pv = SurdValue::from_quad(p);
            let a = pv.sub(&SurdValue::rational(v.clone()));
            let b = pv.add(&SurdValue::rational(v.clone()));
            let lo = if a.cmp_value(&lo_end) == Ordering::Less { lo_end.clone() } else { a };
            let hi = if b.cmp_value(&hi_end) == Ordering::Greater { hi_end.clone() } else { b };
            let len = hi.sub(&lo);
            if len.sign() == Ordering::Greater {
                partial = partial.add(&len);
            }
        }
        SurdValue {
            d: self.d.get(),
            ..partial.add(&SurdValue::rational(two_v * int_rat(full)))
        }
    }

    fn coords(&self, x: &QuadInt) -> (BigInt, BigInt) {
        (x.m().clone(), x.n().clone())
    }

    fn from_coords(&self, a: BigInt, b: BigInt) -> Result<QuadInt> {
        Ok(QuadInt::new(a, b, self.d))
    }

    fn parse_radius(&self, s: &str) -> Result<Rational> {
        let r = parse_rational(s)?;
        if r.is_negative() {
            return Err(Error::usage(format!("radius must be non-negative, got {s}")));
        }
        Ok(r)
    }

    fn region_label(&self, region: &QuadRegion) -> String {
        format!(
            "[{} ± {}] in Z[√{}]",
            region.center,
            format_rational(&region.half),
            self.d.get()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::scheme::enumerate;

    fn lam() -> QuadScheme {
        QuadScheme::new(2, rat(1, 1), true).unwrap()
    }

    /// Exhaustive double loop over a coordinate box, exact comparisons only.
    fn brute(s: &QuadScheme, region: &QuadRegion, mb: i64, nb: i64) -> Vec<QuadInt> {
        let mut out = Vec::new();
        for m in -mb..=mb {
            for n in -nb..=nb {
                let x = s.point(m, n);
                if s.in_lambda(&x) && s.in_region(region, &x) {
                    out.push(x);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(QuadScheme::new(4, rat(1, 1), true).is_err());
        assert!(QuadScheme::new(2, rat(0, 1), true).is_err());
    }

    #[test]
    fn origin_only_at_zero_extent() {
        let s = lam();
        let set = enumerate(&s, &s.interval(rat(0, 1)), 1000).unwrap();
        assert_eq!(set.points(), &[s.zero()]);
    }

    #[test]
    fn matches_brute_force_box() {
        let s = lam();
        let region = s.interval(rat(10, 1));
        let set = enumerate(&s, &region, 1_000_000).unwrap();
        let expect = brute(&s, &region, 25, 18);
        assert_eq!(set.points(), expect.as_slice());
        assert!(set.iter().all(|x| s.in_lambda(x)));
    }

    #[test]
    fn enumeration_complete_for_small_extents() {
        for d in [2u64, 3, 5, 7] {
            for (wn, wd) in [(1, 1), (1, 2), (5, 2)] {
                for closed in [true, false] {
                    let s = QuadScheme::new(d, rat(wn, wd), closed).unwrap();
                    for t in [1i64, 7, 50] {
                        let region = s.interval(rat(t, 1));
                        let got = enumerate(&s, &region, 1_000_000).unwrap();
                        // |m| <= (t + w)/2 + 1 and |n| <= (t + w)/(2 sqrt d) + 1
                        let mb = t + 3;
                        let nb = t + 3;
                        assert_eq!(got.points(), brute(&s, &region, mb, nb).as_slice());
                    }
                }
            }
        }
    }

    #[test]
    fn translated_interval() {
        let s = lam();
        let region = QuadRegion {
            center: s.point(3, -5),
            half: rat(9, 2),
        };
        let got = enumerate(&s, &region, 1_000_000).unwrap();
        assert_eq!(got.points(), brute(&s, &region, 40, 30).as_slice());
        assert!(!got.is_empty());
    }

    #[test]
    fn membership_examples() {
        let s = lam();
        assert!(s.in_lambda(&s.point(3, 2)));
        assert!(s.in_lambda(&s.zero()));
        assert!(!s.in_lambda(&s.point(1, 2)));
        assert!(s.in_lambda_q(&s.point(1, 2), 2));
        assert_eq!(s.min_q(&s.point(1, 2)), BigInt::from(2));
        assert_eq!(s.min_q(&s.zero()), BigInt::from(1));
    }

    #[test]
    fn capacity_guard() {
        let s = lam();
        let err = enumerate(&s, &s.interval(rat(1_000_000, 1)), 1000).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn ball_and_nearest() {
        let s = lam();
        let set = enumerate(&s, &s.interval(rat(20, 1)), 10_000).unwrap();
        let c = s.point(1, 1);
        let got = s.ball_points(&set, &c, &rat(3, 1));
        let expect: Vec<_> = set
            .iter()
            .filter(|p| s.dist(p, &c).abs_le(&rat(3, 1)))
            .cloned()
            .collect();
        assert_eq!(got, expect);
        let (d, at) = s.nearest(&set, &s.point(2, 0)).unwrap();
        let best = set.iter().map(|p| s.dist(p, &s.point(2, 0))).min().unwrap();
        assert_eq!(d, best);
        assert!(at.iter().all(|p| s.dist(p, &s.point(2, 0)) == best));
    }

    #[test]
    fn banach_single_window_is_whole_region() {
        let s = lam();
        let region = s.interval(rat(50, 1));
        let set = enumerate(&s, &region, 10_000).unwrap();
        let (count, len) = s.max_window(&set, &region, &rat(50, 1)).unwrap();
        assert_eq!(count, set.len());
        assert_eq!(len, rat(100, 1));
        assert!(s.max_window(&set, &region, &rat(51, 1)).is_none());
    }
}
