//! Følner families, densities along them, an empirical Banach-density
//! surrogate and rule-based positive-density subsets of a model set.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, int_rat, rational_to_decimal, Rational};
use crate::scheme::{enumerate, PointSet, Scheme, SchemeKind};

/// Nested exhausting regions `ball(g_j, r_j)`, optionally thickened.
#[derive(Clone, Debug)]
pub struct FolnerSpec<S: Scheme> {
    scales: Vec<S::Radius>,
    translates: Option<Vec<S::Point>>,
    thickening: Option<S::Radius>,
}

impl<S: Scheme> FolnerSpec<S> {
    /// Scales must be strictly increasing; translates, if given, one per scale.
    pub fn new(
        scheme: &S,
        scales: Vec<S::Radius>,
        translates: Option<Vec<S::Point>>,
        thickening: Option<S::Radius>,
    ) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::usage("Følner family needs at least one scale"));
        }
        for w in scales.windows(2) {
            if scheme.cmp_radius(&w[0], &w[1]) != Ordering::Less {
                return Err(Error::usage(format!(
                    "scales must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if let Some(t) = &translates {
            if t.len() != scales.len() {
                return Err(Error::usage(format!(
                    "{} translates given for {} scales",
                    t.len(),
                    scales.len()
                )));
            }
        }
        Ok(FolnerSpec {
            scales,
            translates,
            thickening,
        })
    }

    pub fn centered(scheme: &S, scales: Vec<S::Radius>) -> Result<Self> {
        Self::new(scheme, scales, None, None)
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn scales(&self) -> &[S::Radius] {
        &self.scales
    }

    /// The `j`-th region (0-based).
    pub fn region(&self, scheme: &S, j: usize) -> Result<S::Region> {
        let r = self.scales.get(j).ok_or_else(|| {
            Error::usage(format!("scale index {j} outside a family of {}", self.len()))
        })?;
        let center = match &self.translates {
            Some(t) => t[j].clone(),
            None => scheme.zero(),
        };
        let base = scheme.ball(&center, r);
        Ok(match &self.thickening {
            Some(v) => scheme.grow(&base, v),
            None => base,
        })
    }
}

pub fn folner_measure<S: Scheme>(scheme: &S, spec: &FolnerSpec<S>, j: usize) -> Result<Rational> {
    Ok(scheme.measure(&spec.region(scheme, j)?))
}

/// A rule selecting a subset of `Lambda`, evaluated pointwise so that the
/// same point gets the same verdict at every scale.
#[derive(Clone, Debug, PartialEq)]
pub enum SubsetSpec {
    Full,
    /// Keep each point independently with probability `theta`, keyed by a
    /// hash of `(seed, coordinates)`.
    Bernoulli { theta: Rational, seed: u64 },
    /// `|x*| <= w'` with `0 < w' < w`.
    Subwindow { w: Rational },
    /// Quadratic only: `m mod modulus` in `residues`.
    Congruence { modulus: u64, residues: Vec<u64> },
}

impl SubsetSpec {
    pub fn validate<S: Scheme>(&self, scheme: &S) -> Result<()> {
        match self {
            SubsetSpec::Full => Ok(()),
            SubsetSpec::Bernoulli { theta, .. } => {
                if !theta.is_positive() || *theta > Rational::one() {
                    return Err(Error::usage(format!(
                        "bernoulli theta must lie in (0, 1], got {}",
                        format_rational(theta)
                    )));
                }
                Ok(())
            }
            SubsetSpec::Subwindow { w } => {
                if !w.is_positive() || w >= scheme.window() {
                    return Err(Error::usage(format!(
                        "subwindow must satisfy 0 < w' < {}, got {}",
                        format_rational(scheme.window()),
                        format_rational(w)
                    )));
                }
                Ok(())
            }
            SubsetSpec::Congruence { modulus, residues } => {
                if scheme.kind() != SchemeKind::Quadratic {
                    return Err(Error::usage("congruence subsets need a quadratic scheme"));
                }
                if *modulus == 0 || residues.iter().any(|r| r >= modulus) {
                    return Err(Error::usage(format!(
                        "congruence needs modulus > 0 and residues below it, got {modulus} / {residues:?}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Membership of a point of `Lambda` in the subset.
    pub fn contains<S: Scheme>(&self, scheme: &S, x: &S::Point) -> bool {
        match self {
            SubsetSpec::Full => true,
            SubsetSpec::Bernoulli { theta, seed } => bernoulli_keep(scheme, x, theta, *seed),
            SubsetSpec::Subwindow { w } => scheme.star_within(x, w, false),
            SubsetSpec::Congruence { modulus, residues } => {
                let (m, _) = scheme.coords(x);
                let r = m.mod_floor(&BigInt::from(*modulus));
                residues.iter().any(|k| r == BigInt::from(*k))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            SubsetSpec::Full => "full".into(),
            SubsetSpec::Bernoulli { theta, seed } => {
                format!("bernoulli({}, seed {seed})", format_rational(theta))
            }
            SubsetSpec::Subwindow { w } => format!("subwindow({})", format_rational(w)),
            SubsetSpec::Congruence { modulus, residues } => {
                format!("congruence(mod {modulus}, {residues:?})")
            }
        }
    }
}

/// 64-bit key for `(seed, x)`; `u < theta * 2^64` keeps the point.
fn bernoulli_keep<S: Scheme>(scheme: &S, x: &S::Point, theta: &Rational, seed: u64) -> bool {
    if theta.is_one() {
        return true;
    }
    let (a, b) = scheme.coords(x);
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(format!("{a},{b}").as_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 8];
    key.copy_from_slice(&digest[..8]);
    let u = BigInt::from(u64::from_be_bytes(key));
    u * theta.denom() < theta.numer() << 64
}

pub fn subset_generate<S: Scheme>(set: &PointSet<S>, spec: &SubsetSpec) -> PointSet<S> {
    match spec {
        SubsetSpec::Full => set.clone(),
        _ => set.filter(|x| spec.contains(set.scheme(), x)),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityRow {
    pub label: String,
    pub count: usize,
    pub measure: Rational,
    pub ratio: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityTrace {
    pub rows: Vec<DensityRow>,
    /// Max ratio over the last `ceil(j/2)` rows.
    pub limsup_estimate: Rational,
}

impl DensityTrace {
    fn from_rows(rows: Vec<DensityRow>) -> Self {
        let tail = rows.len().div_ceil(2);
        let limsup_estimate = rows[rows.len() - tail..]
            .iter()
            .map(|r| r.ratio.clone())
            .max()
            .unwrap_or_else(Rational::zero);
        DensityTrace {
            rows,
            limsup_estimate,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("scale_label,count,measure_num,measure_den,ratio_decimal\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.label,
                r.count,
                r.measure.numer(),
                r.measure.denom(),
                rational_to_decimal(&r.ratio, 12)
            );
        }
        out
    }
}

/// `|P ∩ F_j| / m(F_j)` for `j < j_max`, with `P = { x in Lambda : rule(x) }`.
pub fn upper_density<S: Scheme>(
    scheme: &S,
    subset: &SubsetSpec,
    spec: &FolnerSpec<S>,
    j_max: usize,
    cap: u64,
) -> Result<DensityTrace> {
    if j_max == 0 || j_max > spec.len() {
        return Err(Error::usage(format!(
            "j_max must lie in 1..={}, got {j_max}",
            spec.len()
        )));
    }
    subset.validate(scheme)?;
    let mut rows = Vec::with_capacity(j_max);
    for j in 0..j_max {
        let region = spec.region(scheme, j)?;
        let set = enumerate(scheme, &region, cap)?;
        let count = set
            .points()
            .par_iter()
            .filter(|x| subset.contains(scheme, x))
            .count();
        let measure = scheme.measure(&region);
        let ratio = int_rat(count) / &measure;
        rows.push(DensityRow {
            label: spec.scales[j].to_string(),
            count,
            measure,
            ratio,
        });
    }
    Ok(DensityTrace::from_rows(rows))
}

/// Empirical upper Banach density: the best count per measure over windows
/// of radius `extent` inside `ambient`. Only a lower bound for `d*`.
pub fn banach_density_emp<S: Scheme>(
    scheme: &S,
    set: &PointSet<S>,
    ambient: &S::Region,
    extent: &S::Radius,
) -> Result<Rational> {
    let (count, measure) = scheme.max_window(set, ambient, extent).ok_or_else(|| {
        Error::usage(format!(
            "window of radius {extent} does not fit in {}",
            scheme.region_label(ambient)
        ))
    })?;
    Ok(int_rat(count) / measure)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountingReport {
    pub windows: usize,
    pub violations: usize,
    /// Largest `|P ∩ Q| * m(V) / m(Q + V)` seen.
    pub worst_ratio: Rational,
    /// `1 / m(V)`, the bound on any Banach density.
    pub density_bound: Rational,
}

/// Checks `|P ∩ Q| <= m(Q + V) / m(V)` on every sampled window `Q`, with
/// `V = ball(0, v)`. Requires `V - V` to miss every nonzero gap of `P`.
pub fn counting_bound_check<S: Scheme>(
    scheme: &S,
    set: &PointSet<S>,
    windows: &[S::Region],
    v: &S::Radius,
) -> Result<CountingReport> {
    if let Some(gap) = scheme.min_gap(set.points()) {
        if !scheme.gap_separated(&gap, v) {
            return Err(Error::usage(format!(
                "neighbourhood radius {v} is too large for minimal gap {}",
                scheme.dist_exact(&gap)
            )));
        }
    }
    let m_v = scheme.measure(&scheme.ball(&scheme.zero(), v));
    if !m_v.is_positive() {
        return Err(Error::usage(format!("neighbourhood radius {v} has zero measure")));
    }
    let results: Vec<(bool, Rational)> = windows
        .par_iter()
        .map(|q| {
            let count = set.iter().filter(|x| scheme.in_region(q, x)).count();
            let bound = scheme.measure(&scheme.grow(q, v)) / &m_v;
            let count = int_rat(count);
            (count > bound, count / bound)
        })
        .collect();
    Ok(CountingReport {
        windows: windows.len(),
        violations: results.iter().filter(|r| r.0).count(),
        worst_ratio: results
            .into_iter()
            .map(|r| r.1)
            .max()
            .unwrap_or_else(Rational::zero),
        density_bound: m_v.recip(),
    })
}

/// `count` windows drawn from `ambient` with radius at most `max_extent`.
pub fn sample_windows<S: Scheme>(
    scheme: &S,
    ambient: &S::Region,
    max_extent: &S::Radius,
    count: usize,
    seed: u64,
) -> Vec<S::Region> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| scheme.sample_region(&mut rng, ambient, max_extent))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::scheme::{PadicScheme, QuadScheme};

    fn lam() -> QuadScheme {
        QuadScheme::new(2, rat(1, 1), true).unwrap()
    }

    fn lam2() -> PadicScheme {
        PadicScheme::new(2, rat(1, 1), true).unwrap()
    }

    #[test]
    fn measures() {
        let s = lam();
        let f = FolnerSpec::centered(&s, vec![rat(5, 1)]).unwrap();
        assert_eq!(folner_measure(&s, &f, 0).unwrap(), rat(10, 1));
        let p = lam2();
        let f = FolnerSpec::centered(&p, vec![3]).unwrap();
        assert_eq!(folner_measure(&p, &f, 0).unwrap(), rat(8, 1));
        let moved = FolnerSpec::new(&p, vec![3], Some(vec![p.point(5, 2)]), None).unwrap();
        assert_eq!(folner_measure(&p, &moved, 0).unwrap(), rat(8, 1));
        assert!(folner_measure(&p, &moved, 1).is_err());
    }

    #[test]
    fn scales_must_increase() {
        let s = lam();
        assert!(FolnerSpec::centered(&s, vec![rat(5, 1), rat(5, 1)]).is_err());
        assert!(FolnerSpec::centered(&s, vec![]).is_err());
        assert!(FolnerSpec::new(&s, vec![rat(1, 1)], Some(vec![]), None).is_err());
    }

    #[test]
    fn padic_count_law_trace() {
        let p = lam2();
        let f = FolnerSpec::centered(&p, (1..=12).collect()).unwrap();
        let trace = upper_density(&p, &SubsetSpec::Full, &f, 12, 1_000_000).unwrap();
        for (n, row) in (1..=12u32).zip(&trace.rows) {
            let size = 1i64 << n;
            assert_eq!(row.count as i64, 2 * size + 1);
            assert_eq!(row.ratio, rat(2 * size + 1, size));
        }
        // tail = scales 7..12, ratios decrease
        assert_eq!(trace.limsup_estimate, rat(257, 128));
        assert!(trace.to_csv().starts_with("scale_label,count,measure_num,measure_den,ratio_decimal\n1,5,2,1,2.500000000000\n"));
    }

    #[test]
    fn empty_subset_has_zero_trace() {
        let s = lam();
        let f = FolnerSpec::centered(&s, vec![rat(10, 1), rat(20, 1)]).unwrap();
        let none = SubsetSpec::Congruence { modulus: 2, residues: vec![] };
        let trace = upper_density(&s, &none, &f, 2, 100_000).unwrap();
        assert!(trace.rows.iter().all(|r| r.count == 0 && r.ratio.is_zero()));
        assert!(trace.limsup_estimate.is_zero());
    }

    #[test]
    fn subset_rules() {
        let s = lam();
        let set = enumerate(&s, &s.interval(rat(100, 1)), 100_000).unwrap();
        assert_eq!(subset_generate(&set, &SubsetSpec::Full).points(), set.points());
        let sub = subset_generate(&set, &SubsetSpec::Subwindow { w: rat(1, 2) });
        let expect: Vec<_> = set
            .iter()
            .filter(|x| x.star().abs_le(&rat(1, 2)))
            .cloned()
            .collect();
        assert_eq!(sub.points(), expect.as_slice());
        let evens = subset_generate(
            &set,
            &SubsetSpec::Congruence { modulus: 2, residues: vec![0] },
        );
        assert!(evens.iter().all(|x| x.m().is_even()));
        assert!(SubsetSpec::Subwindow { w: rat(1, 1) }.validate(&s).is_err());
        assert!(SubsetSpec::Bernoulli { theta: rat(0, 1), seed: 1 }.validate(&s).is_err());
        assert!(SubsetSpec::Congruence { modulus: 2, residues: vec![0] }
            .validate(&lam2())
            .is_err());
    }

    #[test]
    fn bernoulli_is_scale_consistent() {
        let s = lam();
        let spec = SubsetSpec::Bernoulli { theta: rat(1, 2), seed: 7 };
        let small = subset_generate(&enumerate(&s, &s.interval(rat(100, 1)), 100_000).unwrap(), &spec);
        let big = subset_generate(&enumerate(&s, &s.interval(rat(1000, 1)), 100_000).unwrap(), &spec);
        assert!(small.is_subset_of(&big));
        assert_eq!(big.restrict(&s.interval(rat(100, 1))).points(), small.points());
        let frac = big.len() as f64 / enumerate(&s, &s.interval(rat(1000, 1)), 100_000).unwrap().len() as f64;
        assert!((frac - 0.5).abs() < 0.05, "kept fraction {frac}");
    }

    #[test]
    fn banach_surrogate() {
        let s = lam();
        let region = s.interval(rat(200, 1));
        let set = enumerate(&s, &region, 100_000).unwrap();
        assert_eq!(
            banach_density_emp(&s, &set, &region, &rat(200, 1)).unwrap(),
            int_rat(set.len()) / rat(400, 1)
        );
        let all = subset_generate(&set, &SubsetSpec::Bernoulli { theta: rat(1, 1), seed: 3 });
        assert_eq!(
            banach_density_emp(&s, &all, &region, &rat(10, 1)).unwrap(),
            banach_density_emp(&s, &set, &region, &rat(10, 1)).unwrap()
        );
        assert!(banach_density_emp(&s, &set, &region, &rat(201, 1)).is_err());
    }

    #[test]
    fn counting_bounds_hold() {
        let s = lam();
        let ambient = s.interval(rat(300, 1));
        let set = enumerate(&s, &ambient, 100_000).unwrap();
        let windows = sample_windows(&s, &ambient, &rat(50, 1), 100, 11);
        let r = counting_bound_check(&s, &set, &windows, &rat(1, 4)).unwrap();
        assert_eq!((r.windows, r.violations), (100, 0));
        assert_eq!(r.density_bound, rat(2, 1));
        let empty = PointSet::empty(s.clone(), ambient.clone());
        assert_eq!(counting_bound_check(&s, &empty, &windows, &rat(1, 4)).unwrap().violations, 0);
        assert!(counting_bound_check(&s, &set, &windows, &rat(3, 4)).is_err());

        let p = lam2();
        let ball = p.level_ball(8);
        let pset = enumerate(&p, &ball, 100_000).unwrap();
        let gap = p.min_gap(pset.points()).unwrap();
        let v = p.separating_radius(&gap);
        let windows = sample_windows(&p, &ball, &6, 100, 5);
        let r = counting_bound_check(&p, &pset, &windows, &v).unwrap();
        assert_eq!(r.violations, 0);
        assert!(banach_density_emp(&p, &pset, &ball, &3).unwrap() <= r.density_bound);
        assert!(counting_bound_check(&p, &pset, &windows, &(v + 1)).is_err());
    }
}
