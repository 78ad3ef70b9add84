//! Local structure of a point set: bounded difference sets, separation of
//! `Xi - Lambda^q` from the origin, patch statistics around every point and
//! the mass of small thickenings.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::{int_rat, Rational, SurdValue};
use crate::scheme::{enumerate, PointSet, Scheme};

/// `P - P` (order 1) or `P - P + P - P` (order 2), cut to a ball around 0.
#[derive(Clone, Debug)]
pub struct DiffSet<S: Scheme> {
    pub order: u8,
    pub radius: S::Radius,
    pub differences: PointSet<S>,
}

/// Differences of `set` within `radius` of the origin. Only near pairs are
/// formed, through the scheme's ball query.
pub fn difference_set<S: Scheme>(
    scheme: &S,
    set: &PointSet<S>,
    radius: &S::Radius,
    order: u8,
    cap: u64,
) -> Result<DiffSet<S>> {
    let region = scheme.ball(&scheme.zero(), radius);
    let first: Vec<S::Point> = set
        .points()
        .par_iter()
        .flat_map_iter(|x| {
            scheme
                .ball_points(set, x, radius)
                .into_iter()
                .map(move |y| scheme.sub(&y, x))
        })
        .collect();
    let differences = match order {
        1 => PointSet::from_points(scheme.clone(), region, first),
        2 => {
            let pairs = (set.len() as u128).pow(2);
            if pairs > cap as u128 {
                return Err(Error::Capacity {
                    what: "full difference set".into(),
                    estimate: pairs.to_string(),
                    cap,
                });
            }
            // a + b within radius with a, b in the unrestricted P - P
            let all: Vec<S::Point> = set
                .points()
                .par_iter()
                .flat_map_iter(|x| set.iter().map(move |y| scheme.sub(y, x)))
                .collect();
            let wide_r = scheme.radius_of(&diameter(scheme, &all));
            let full = PointSet::from_points(scheme.clone(), scheme.ball(&scheme.zero(), &wide_r), all);
            let second: Vec<S::Point> = full
                .points()
                .par_iter()
                .flat_map_iter(|a| {
                    scheme
                        .ball_points(&full, &scheme.neg(a), radius)
                        .into_iter()
                        .map(move |b| scheme.add(a, &b))
                })
                .collect();
            PointSet::from_points(scheme.clone(), region, second)
        }
        _ => return Err(Error::usage(format!("difference order must be 1 or 2, got {order}"))),
    };
    Ok(DiffSet {
        order,
        radius: radius.clone(),
        differences,
    })
}

fn diameter<S: Scheme>(scheme: &S, pts: &[S::Point]) -> S::Dist {
    pts.iter()
        .map(|x| scheme.norm(x))
        .max()
        .unwrap_or_else(|| scheme.norm(&scheme.zero()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationReport<S: Scheme> {
    pub ok: bool,
    /// Smallest nonzero `|z|` over `z in Xi - Lambda(qW)` inside the scan
    /// ball; `None` if the ball holds no such `z`.
    pub max_admissible_radius: Option<S::Dist>,
    pub witness: Option<S::Point>,
    /// `|z*| <= (2 + q) w` candidates examined.
    pub scanned: usize,
    pub scan_radius: S::Radius,
}

/// Decides `(Xi - Lambda^q) ∩ V = {0}` for `V = ball(v)`, using the window
/// superset `Lambda(qW)` of `Lambda^q`. Elements `z = xi - y` obey
/// `|z*| <= (2 + q) w`, so the scan runs over that model set inside
/// `ball(scan_radius)`.
pub fn separation_check<S: Scheme>(
    scheme: &S,
    xi: &DiffSet<S>,
    q: u64,
    v: &S::Radius,
    scan_radius: &S::Radius,
    cap: u64,
) -> Result<SeparationReport<S>> {
    if q == 0 {
        return Err(Error::usage("q must be at least 1"));
    }
    let wide = scheme.with_window(scheme.window() * int_rat(2 + q), true);
    let near = enumerate(&wide, &scheme.ball(&scheme.zero(), scan_radius), cap)?;
    let zero = scheme.zero();
    let hits: Vec<&S::Point> = near
        .points()
        .par_iter()
        .filter(|z| **z != zero)
        .filter(|z| {
            xi.differences
                .iter()
                .any(|x| scheme.in_lambda_q(&scheme.sub(x, z), q))
        })
        .collect();
    let best = hits.into_iter().min_by(|a, b| {
        scheme
            .norm(a)
            .cmp(&scheme.norm(b))
            .then_with(|| a.cmp(b))
    });
    let mu = best.map(|z| scheme.norm(z));
    let ok = match &mu {
        Some(m) => !scheme.dist_within(m, v),
        None => scheme.cmp_radius(v, scan_radius) == Ordering::Less,
    };
    Ok(SeparationReport {
        ok,
        max_admissible_radius: mu,
        witness: best.cloned(),
        scanned: near.len(),
        scan_radius: scan_radius.clone(),
    })
}

/// Patch key: exact coordinates of `(P - x) ∩ ball(rho)`, ascending.
pub type PatchKey = Vec<(BigInt, BigInt)>;

#[derive(Clone, Debug, PartialEq)]
pub struct PatchStats {
    pub radius: String,
    pub total_centers: usize,
    pub patches: BTreeMap<PatchKey, usize>,
}

impl PatchStats {
    pub fn distinct(&self) -> usize {
        self.patches.len()
    }

    pub fn frequency(&self, key: &PatchKey) -> Rational {
        let c = self.patches.get(key).copied().unwrap_or(0);
        int_rat(c) / int_rat(self.total_centers.max(1))
    }

    pub fn to_json(&self) -> Value {
        let num = |b: &BigInt| match b.to_i64() {
            Some(v) => json!(v),
            None => json!(b.to_string()),
        };
        let patches: Vec<Value> = self
            .patches
            .iter()
            .map(|(k, c)| {
                let key: Vec<Value> = k.iter().map(|(a, b)| json!([num(a), num(b)])).collect();
                json!({ "key": key, "count": c })
            })
            .collect();
        json!({
            "radius": self.radius,
            "total_centers": self.total_centers,
            "patches": patches,
        })
    }
}

/// Tallies the centred patches `(P - x) ∩ ball(rho)` for `x in P ∩ inner`.
pub fn patch_census<S: Scheme>(
    scheme: &S,
    set: &PointSet<S>,
    inner: &S::Region,
    rho: &S::Radius,
) -> Result<PatchStats> {
    if !scheme.region_within(inner, set.region(), rho) {
        return Err(Error::usage(format!(
            "patch radius {rho} around {} leaves {}",
            scheme.region_label(inner),
            scheme.region_label(set.region())
        )));
    }
    let keys: Vec<PatchKey> = set
        .points()
        .par_iter()
        .filter(|x| scheme.in_region(inner, x))
        .map(|x| {
            scheme
                .ball_points(set, x, rho)
                .iter()
                .map(|y| scheme.coords(&scheme.sub(y, x)))
                .collect()
        })
        .collect();
    let mut patches = BTreeMap::new();
    for k in &keys {
        *patches.entry(k.clone()).or_insert(0) += 1;
    }
    Ok(PatchStats {
        radius: rho.to_string(),
        total_centers: keys.len(),
        patches,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MassReport {
    pub points: usize,
    pub boundary_points: usize,
    pub thickened_measure: SurdValue,
    /// `m(V) * |P ∩ region|`.
    pub predicted_measure: Rational,
    /// `|thickened - predicted| / predicted`.
    pub relative_discrepancy: SurdValue,
    /// `|thickened - predicted| / m(region)`.
    pub density_gap: SurdValue,
    /// `m(V) * boundary_points / m(region)`.
    pub bound: Rational,
    pub within_bound: bool,
}

/// Compares the measure of the `v`-thickening of `P` inside `region` with
/// `m(V)` times the point count. Thickenings must be disjoint.
pub fn transverse_mass_check<S: Scheme>(
    scheme: &S,
    set: &PointSet<S>,
    region: &S::Region,
    v: &S::Radius,
) -> Result<MassReport> {
    if let Some(gap) = scheme.min_gap(set.points()) {
        if !scheme.gap_separated(&gap, v) {
            return Err(Error::usage(format!(
                "thickening radius {v} makes neighbourhoods overlap at gap {}",
                scheme.dist_exact(&gap)
            )));
        }
    }
    let near = set.restrict(&scheme.grow(region, v));
    let inside: Vec<&S::Point> = near.iter().filter(|x| scheme.in_region(region, x)).collect();
    let zero_r = scheme.radius_zero();
    let boundary_points = near
        .iter()
        .filter(|x| !scheme.region_within(&scheme.ball(x, v), region, &zero_r))
        .count();
    let m_v = scheme.measure(&scheme.ball(&scheme.zero(), v));
    let m_region = scheme.measure(region);
    let thickened = scheme.thickening_measure(&near, region, v);
    let predicted = &m_v * int_rat(inside.len());
    let diff = thickened.sub(&SurdValue::rational(predicted.clone())).abs();
    let relative = if predicted.is_zero() {
        SurdValue::rational(Rational::zero())
    } else {
        diff.scale(&predicted.recip())
    };
    let density_gap = diff.scale(&m_region.recip());
    let bound = &m_v * int_rat(boundary_points) / &m_region;
    let within_bound = density_gap.cmp_value(&SurdValue::rational(bound.clone())) != Ordering::Greater;
    Ok(MassReport {
        points: inside.len(),
        boundary_points,
        thickened_measure: thickened,
        predicted_measure: predicted,
        relative_discrepancy: relative,
        density_gap,
        bound,
        within_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, QuadInt};
    use crate::scheme::{PadicNorm, PadicScheme, QuadScheme};

    fn lam() -> QuadScheme {
        QuadScheme::new(2, rat(1, 1), true).unwrap()
    }

    #[test]
    fn difference_sets() {
        let s = lam();
        let single = PointSet::from_points(s.clone(), s.interval(rat(1, 1)), vec![s.zero()]);
        let d = difference_set(&s, &single, &rat(5, 1), 1, 1000).unwrap();
        assert_eq!(d.differences.points(), &[s.zero()]);

        let set = enumerate(&s, &s.interval(rat(200, 1)), 100_000).unwrap();
        let d = difference_set(&s, &set, &rat(10, 1), 1, 1_000_000).unwrap();
        assert!(d.differences.iter().all(|x| x.star().abs_le(&rat(2, 1))));
        assert!(d.differences.iter().all(|x| d.differences.contains(&-x)));
        assert!(d.differences.contains(&s.zero()));
        let bigger = enumerate(&s, &s.interval(rat(400, 1)), 100_000).unwrap();
        let d2 = difference_set(&s, &bigger, &rat(10, 1), 1, 1_000_000).unwrap();
        assert_eq!(d.differences.points(), d2.differences.points());
        // |x| |x*| = |N(x)| >= 1 for nonzero x
        for x in d.differences.iter().filter(|x| !x.is_zero()) {
            assert!(!x.norm().is_zero());
        }

        let small = enumerate(&s, &s.interval(rat(30, 1)), 100_000).unwrap();
        let dd = difference_set(&s, &small, &rat(5, 1), 2, 1_000_000).unwrap();
        let d1 = difference_set(&s, &small, &rat(5, 1), 1, 1_000_000).unwrap();
        assert!(d1.differences.is_subset_of(&dd.differences));
        assert!(dd.differences.iter().all(|x| x.star().abs_le(&rat(4, 1))));
        assert!(difference_set(&s, &small, &rat(5, 1), 3, 1_000_000).is_err());
        assert!(difference_set(&s, &small, &rat(5, 1), 2, 10).is_err());
    }

    /// Smallest nonzero `|z|` over a coordinate box with `z = xi - y`,
    /// `xi` in the given differences and `|y*| <= q w`.
    fn brute_min(s: &QuadScheme, xi: &[QuadInt], q: i64) -> QuadInt {
        let mut best: Option<QuadInt> = None;
        for m in -12i64..=12 {
            for n in -12i64..=12 {
                let z = s.point(m, n);
                if z.is_zero() || !z.star().abs_le(&rat(2 + q, 1)) {
                    continue;
                }
                if xi.iter().any(|x| (x - &z).star().abs_le(&rat(q, 1))) {
                    let a = z.abs();
                    if best.as_ref().is_none_or(|b| a < *b) {
                        best = Some(a);
                    }
                }
            }
        }
        best.unwrap()
    }

    #[test]
    fn quadratic_separation() {
        let s = lam();
        let set = enumerate(&s, &s.interval(rat(100, 1)), 100_000).unwrap();
        let xi = difference_set(&s, &set, &rat(8, 1), 1, 1_000_000).unwrap();
        let r = separation_check(&s, &xi, 1, &rat(1, 4), &rat(1, 1), 100_000).unwrap();
        let mu = r.max_admissible_radius.clone().unwrap();
        assert_eq!(mu, s.point(-1, 1));
        assert_eq!(mu, brute_min(&s, xi.differences.points(), 1));
        assert!(!mu.abs_lt(&rat(1, 3)));
        assert!(r.ok);
        assert!(separation_check(&s, &xi, 1, &rat(0, 1), &rat(1, 1), 100_000).unwrap().ok);
        assert!(!separation_check(&s, &xi, 1, &rat(1, 2), &rat(1, 1), 100_000).unwrap().ok);
        let w = r.witness.unwrap();
        assert_eq!(w.abs(), mu);
    }

    #[test]
    fn padic_separation() {
        let p = PadicScheme::new(2, rat(1, 1), true).unwrap();
        let set = enumerate(&p, &p.level_ball(6), 100_000).unwrap();
        let xi = difference_set(&p, &set, &3, 1, 1_000_000).unwrap();
        let r = separation_check(&p, &xi, 1, &-2, &0, 100_000).unwrap();
        assert_eq!(r.max_admissible_radius, Some(PadicNorm::Pow(-1)));
        assert!(r.ok);
        assert!(!separation_check(&p, &xi, 1, &-1, &0, 100_000).unwrap().ok);
        let p3 = PadicScheme::new(3, rat(1, 1), true).unwrap();
        let set = enumerate(&p3, &p3.level_ball(4), 100_000).unwrap();
        let xi = difference_set(&p3, &set, &2, 1, 1_000_000).unwrap();
        let r = separation_check(&p3, &xi, 1, &-2, &0, 100_000).unwrap();
        assert_eq!(r.max_admissible_radius, Some(PadicNorm::Pow(-1)));
    }

    #[test]
    fn periodic_set_has_one_patch() {
        let s = lam();
        let pts = (-50..=50).map(|k| s.point(k, 0)).collect();
        let set = PointSet::from_points(s.clone(), s.interval(rat(50, 1)), pts);
        let stats = patch_census(&s, &set, &s.interval(rat(40, 1)), &rat(5, 1)).unwrap();
        assert_eq!(stats.distinct(), 1);
        assert_eq!(stats.total_centers, 81);
    }

    #[test]
    fn patch_counts_stabilise() {
        let s = lam();
        let census = |t: i64| {
            let set = enumerate(&s, &s.interval(rat(t, 1)), 1_000_000).unwrap();
            patch_census(&s, &set, &s.interval(rat(t - 5, 1)), &rat(5, 1)).unwrap()
        };
        let a = census(1000);
        let b = census(10_000);
        assert_eq!(a.distinct(), b.distinct());
        let total: Rational = b.patches.keys().map(|k| b.frequency(k)).sum();
        assert_eq!(total, rat(1, 1));
        assert!(b.patches.keys().all(|k| k.contains(&(BigInt::zero(), BigInt::zero()))));
        let smaller = {
            let set = enumerate(&s, &s.interval(rat(1000, 1)), 1_000_000).unwrap();
            patch_census(&s, &set, &s.interval(rat(995, 1)), &rat(3, 1)).unwrap()
        };
        assert!(smaller.distinct() <= a.distinct());
        let json = a.to_json();
        assert_eq!(json["total_centers"], a.total_centers);
        assert!(patch_census(&s, &enumerate(&s, &s.interval(rat(10, 1)), 1000).unwrap(), &s.interval(rat(8, 1)), &rat(5, 1)).is_err());
    }

    #[test]
    fn transverse_mass() {
        let s = lam();
        let one = PointSet::from_points(s.clone(), s.interval(rat(10, 1)), vec![s.zero()]);
        let r = transverse_mass_check(&s, &one, &s.interval(rat(10, 1)), &rat(1, 8)).unwrap();
        assert_eq!(r.relative_discrepancy.sign(), Ordering::Equal);

        let region = s.interval(rat(10_000, 1));
        let set = enumerate(&s, &s.grow(&region, &rat(1, 1)), 1_000_000).unwrap();
        let r = transverse_mass_check(&s, &set, &region, &rat(1, 8)).unwrap();
        assert!(r.within_bound);
        assert!(r.relative_discrepancy.cmp_value(&SurdValue::rational(rat(1, 1000))) != Ordering::Greater);
        assert!(transverse_mass_check(&s, &set, &region, &rat(3, 4)).is_err());

        let p = PadicScheme::new(2, rat(1, 1), true).unwrap();
        let set = enumerate(&p, &p.level_ball(8), 100_000).unwrap();
        // the minimal gap is |2|_2: level -2 balls are disjoint, level -1 are not
        assert_eq!(p.min_gap(set.points()), Some(PadicNorm::Pow(-1)));
        let r = transverse_mass_check(&p, &set, &p.level_ball(8), &-2).unwrap();
        assert!(r.within_bound);
        assert_eq!(r.relative_discrepancy.sign(), Ordering::Equal);
        assert_eq!(r.predicted_measure, rat(set.len() as i64, 4));
        assert!(transverse_mass_check(&p, &set, &p.level_ball(8), &-1).is_err());
    }
}
