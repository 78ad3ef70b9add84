use std::collections::HashSet;

use rayon::prelude::*;

use super::{enumerate, Scheme};
use crate::error::{Error, Result};

/// Finite-scale verdicts for the approximate-lattice axioms, evaluated on
/// the margin-shrunk inner region.
#[derive(Clone, Debug)]
pub struct AxiomReport<S: Scheme> {
    pub inner: S::Region,
    pub inner_points: usize,
    pub symmetric: bool,
    pub contains_zero: bool,
    pub min_gap: Option<S::Dist>,
    pub covering_radius: Option<S::Dist>,
    /// Greedy hitting set `F` with `x + y - f in Lambda` for every pair of
    /// inner points, in canonical order.
    pub approx_correction_set: Vec<S::Point>,
    pub distinct_sums: usize,
    /// Sums left without a correction inside the candidate pool.
    pub uncovered_sums: usize,
    pub correction_candidates: usize,
    pub products_checked: usize,
    pub mult_closed_violations: usize,
}

pub fn verify_axioms<S: Scheme>(
    scheme: &S,
    region: &S::Region,
    margin: &S::Radius,
    cap: u64,
) -> Result<AxiomReport<S>> {
    let inner = scheme.shrink(region, margin).ok_or_else(|| {
        Error::usage(format!(
            "margin {margin} leaves nothing of {}",
            scheme.region_label(region)
        ))
    })?;
    let set = enumerate(scheme, region, cap)?;
    let inner_set = set.restrict(&inner);
    let pts = inner_set.points();

    let symmetric = pts.par_iter().all(|x| scheme.in_lambda(&scheme.neg(x)));
    let contains_zero = scheme.in_lambda(&scheme.zero());
    let min_gap = scheme.min_gap(pts);
    let covering_radius = scheme.covering(&set, &inner);

    // distinct sums x + y, x <= y
    let sums: HashSet<S::Point> = (0..pts.len())
        .into_par_iter()
        .fold(HashSet::new, |mut acc, i| {
            for y in &pts[i..] {
                acc.insert(scheme.add(&pts[i], y));
            }
            acc
        })
        .reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    let distinct_sums = sums.len();
    let mut outside: Vec<S::Point> = sums.into_iter().filter(|s| !scheme.in_lambda(s)).collect();
    outside.sort();
    let needs_zero = distinct_sums > outside.len();

    // x + y - f in Lambda with x + y in Lambda(2W) forces |f*| <= 3w
    let pool_scheme = scheme.with_window(scheme.window() * crate::exactnum::int_rat(3), true);
    let reach = covering_radius
        .as_ref()
        .map(|c| scheme.radius_of(c))
        .unwrap_or_else(|| margin.clone());
    let pool_region = scheme.ball(&scheme.zero(), &scheme.radius_add(&reach, &reach));
    let mut pool: Vec<S::Point> = enumerate(&pool_scheme, &pool_region, cap)?
        .points()
        .iter()
        .filter(|f| **f != scheme.zero())
        .cloned()
        .collect();
    pool.sort_by(|a, b| scheme.norm(a).cmp(&scheme.norm(b)).then_with(|| {
        scheme.coords(a).cmp(&scheme.coords(b))
    }));
    let covers: Vec<Vec<bool>> = pool
        .par_iter()
        .map(|f| outside.iter().map(|s| scheme.in_lambda(&scheme.sub(s, f))).collect())
        .collect();

    let mut uncovered = vec![true; outside.len()];
    let mut left = outside.len();
    let mut chosen: Vec<S::Point> = Vec::new();
    while left > 0 {
        let gain = |c: &Vec<bool>| c.iter().zip(&uncovered).filter(|(a, b)| **a && **b).count();
        let best = covers
            .iter()
            .enumerate()
            .map(|(i, c)| (gain(c), i))
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        match best {
            Some((g, i)) if g > 0 => {
                for (u, c) in uncovered.iter_mut().zip(&covers[i]) {
                    if *c {
                        *u = false;
                    }
                }
                left -= g;
                chosen.push(pool[i].clone());
            }
            _ => break,
        }
    }
    if needs_zero {
        chosen.push(scheme.zero());
    }
    chosen.sort();

    let (products_checked, mult_closed_violations) = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut checked = 0usize;
            let mut bad = 0usize;
            for y in &pts[i..] {
                let prod = scheme.mul(&pts[i], y);
                if scheme.in_region(&inner, &prod) {
                    checked += 1;
                    if !scheme.in_lambda(&prod) {
                        bad += 1;
                    }
                }
            }
            (checked, bad)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    Ok(AxiomReport {
        inner,
        inner_points: pts.len(),
        symmetric,
        contains_zero,
        min_gap,
        covering_radius,
        approx_correction_set: chosen,
        distinct_sums,
        uncovered_sums: left,
        correction_candidates: pool.len(),
        products_checked,
        mult_closed_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::scheme::{PadicNorm, PadicScheme, QuadScheme};

    #[test]
    fn quadratic_correction_set_within_unit_translates() {
        let s = QuadScheme::new(2, rat(1, 1), true).unwrap();
        let r = verify_axioms(&s, &s.interval(rat(120, 1)), &rat(10, 1), 1_000_000).unwrap();
        assert!(r.symmetric && r.contains_zero);
        assert_eq!(r.uncovered_sums, 0);
        let allowed = [s.point(-1, 0), s.zero(), s.point(1, 0)];
        assert!(r.approx_correction_set.iter().all(|f| allowed.contains(f)));
        assert_eq!(r.mult_closed_violations, 0);
        assert!(r.products_checked > 0);
        // |x| >= 1/2 for nonzero x in Lambda - Lambda
        assert!(!r.min_gap.unwrap().abs_lt(&rat(1, 2)));
    }

    #[test]
    fn padic_axioms() {
        let s = PadicScheme::new(2, rat(1, 1), true).unwrap();
        let r = verify_axioms(&s, &s.level_ball(6), &0, 1_000_000).unwrap();
        assert!(r.symmetric && r.contains_zero);
        assert_eq!(r.mult_closed_violations, 0);
        assert_eq!(r.uncovered_sums, 0);
        assert_eq!(r.covering_radius, Some(PadicNorm::Pow(-1)));
        assert!(r.approx_correction_set.len() <= 3);
    }

    #[test]
    fn wide_window_breaks_multiplicative_closure() {
        let s = QuadScheme::new(2, rat(2, 1), true).unwrap();
        let r = verify_axioms(&s, &s.interval(rat(30, 1)), &rat(2, 1), 1_000_000).unwrap();
        assert!(r.mult_closed_violations > 0);
    }

    #[test]
    fn oversized_margin_is_rejected() {
        let s = QuadScheme::new(2, rat(1, 1), true).unwrap();
        assert!(matches!(
            verify_axioms(&s, &s.interval(rat(5, 1)), &rat(6, 1), 1000),
            Err(Error::Usage(_))
        ));
    }
}
