//! Pattern search in subsets of a model set: gap sets of dilated
//! configurations, arithmetic-progression gaps, multiple-recurrence scans
//! over endomorphisms, iterated sumsets and syndeticity estimates.
//!
//! Every scan reduces to one engine: for a candidate `lambda`, the base
//! points are `x in P ∩ inner` with `x + a_k(lambda) in P` for every
//! displacement map `a_k`. Dilation by `f` is `MultBy(f)`, the `k`-th term
//! of a progression is `IntScale(k)`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{int_rat, Rational, SurdValue};
use crate::scheme::{PointSet, Scheme};

/// An additive map `G -> G` used as a displacement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Endo<P> {
    MultBy(P),
    IntScale(i64),
}

impl<P: Clone> Endo<P> {
    pub fn apply<S: Scheme<Point = P>>(&self, scheme: &S, x: &P) -> P {
        match self {
            Endo::MultBy(c) => scheme.mul(c, x),
            Endo::IntScale(k) => scheme.scale(x, &BigInt::from(*k)),
        }
    }
}

impl<P: std::fmt::Display> std::fmt::Display for Endo<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Endo::MultBy(c) => write!(f, "mult_by({c})"),
            Endo::IntScale(k) => write!(f, "int_scale({k})"),
        }
    }
}

/// `a(x + y) = a(x) + a(y)` on every pair of samples.
pub fn endo_additive<S: Scheme>(scheme: &S, endo: &Endo<S::Point>, samples: &[S::Point]) -> bool {
    samples.par_iter().all(|x| {
        let ax = endo.apply(scheme, x);
        samples.iter().all(|y| {
            endo.apply(scheme, &scheme.add(x, y)) == scheme.add(&ax, &endo.apply(scheme, y))
        })
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EndoCheck<P> {
    pub ok: bool,
    /// Largest `|a(x)*|` over the set, with the `x` attaining it.
    pub max_star: Option<(SurdValue, P)>,
    /// First `x` in canonical order with `a(x)` outside `Lambda(qW)`.
    pub violation: Option<P>,
    /// Smallest `q` that would have passed.
    pub min_q: BigInt,
}

/// Tests `a(x) in Lambda(qW)` for every point of `set`.
pub fn endo_check<S: Scheme>(
    scheme: &S,
    endo: &Endo<S::Point>,
    set: &PointSet<S>,
    q: u64,
) -> Result<EndoCheck<S::Point>> {
    if q == 0 {
        return Err(Error::usage("q must be at least 1"));
    }
    let images: Vec<(S::Point, S::Point)> = set
        .points()
        .par_iter()
        .map(|x| (x.clone(), endo.apply(scheme, x)))
        .collect();
    let violation = images
        .iter()
        .find(|(_, ax)| !scheme.in_lambda_q(ax, q))
        .map(|(x, _)| x.clone());
    let extreme = images
        .iter()
        .max_by(|a, b| scheme.cmp_star_abs(&a.1, &b.1).then(b.0.cmp(&a.0)));
    let max_star = extreme.map(|(x, ax)| (scheme.star_abs_value(ax), x.clone()));
    let min_q = extreme
        .map(|(_, ax)| scheme.min_q(ax))
        .unwrap_or_else(|| BigInt::from(1));
    Ok(EndoCheck {
        ok: violation.is_none(),
        max_star,
        violation,
        min_q,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum PatternMode<P> {
    /// `lambda * f` for each `f` in the configuration.
    Dilation(Vec<P>),
    /// `k * lambda` for `k = 1..=r`.
    Multiples(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatternQuery<P> {
    pub mode: PatternMode<P>,
}

impl<P: Clone + Eq + std::hash::Hash + std::fmt::Display> PatternQuery<P> {
    pub fn dilation(pattern: Vec<P>) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::usage("pattern must be nonempty"));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = pattern.iter().find(|f| !seen.insert(*f)) {
            return Err(Error::usage(format!("pattern element {dup} repeated")));
        }
        Ok(PatternQuery {
            mode: PatternMode::Dilation(pattern),
        })
    }

    pub fn multiples(r: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::usage("progression length r must be positive"));
        }
        Ok(PatternQuery {
            mode: PatternMode::Multiples(r),
        })
    }

    pub fn endos(&self) -> Vec<Endo<P>> {
        match &self.mode {
            PatternMode::Dilation(f) => f.iter().cloned().map(Endo::MultBy).collect(),
            PatternMode::Multiples(r) => (1..=*r as i64).map(Endo::IntScale).collect(),
        }
    }

    pub fn label(&self) -> String {
        match &self.mode {
            PatternMode::Dilation(f) => {
                let parts: Vec<String> = f.iter().map(|x| format!("({x})")).collect();
                format!("dilation {}", parts.join(" "))
            }
            PatternMode::Multiples(r) => format!("progression r={r}"),
        }
    }
}

pub(crate) fn check_margin<S: Scheme>(
    scheme: &S,
    outer: &S::Region,
    inner: &S::Region,
    lambda: &S::Point,
    displacements: &[S::Point],
) -> Result<()> {
    for d in displacements {
        let r = scheme.radius_of(&scheme.norm(d));
        if !scheme.region_within(inner, outer, &r) {
            return Err(Error::usage(format!(
                "displacement {d} for lambda {lambda} leaves {} from inner region {}",
                scheme.region_label(outer),
                scheme.region_label(inner)
            )));
        }
    }
    Ok(())
}

fn displacements<S: Scheme>(scheme: &S, endos: &[Endo<S::Point>], lambda: &S::Point) -> Vec<S::Point> {
    endos.iter().map(|e| e.apply(scheme, lambda)).collect()
}

/// All `x in P ∩ inner` with `x + d in P` for every displacement `d`.
pub fn find_base_points<S: Scheme>(
    scheme: &S,
    p_o: &PointSet<S>,
    inner: &S::Region,
    lambda: &S::Point,
    endos: &[Endo<S::Point>],
) -> Result<Vec<S::Point>> {
    let disp = displacements(scheme, endos, lambda);
    check_margin(scheme, p_o.region(), inner, lambda, &disp)?;
    Ok(p_o
        .points()
        .par_iter()
        .filter(|x| scheme.in_region(inner, x))
        .filter(|x| disp.iter().all(|d| p_o.contains(&scheme.add(x, d))))
        .cloned()
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapRow<P> {
    pub lambda: P,
    pub bases: Vec<P>,
}

#[derive(Clone, Debug)]
pub struct GapSetReport<S: Scheme> {
    pub label: String,
    pub inner: S::Region,
    pub inner_measure: Rational,
    pub candidates: usize,
    /// Rows for `lambda` with at least one base point, canonical order.
    pub rows: Vec<GapRow<S::Point>>,
    pub gap_points: PointSet<S>,
}

impl<S: Scheme> GapSetReport<S> {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn base_count(&self, lambda: &S::Point) -> usize {
        self.rows
            .binary_search_by(|r| r.lambda.cmp(lambda))
            .map(|i| self.rows[i].bases.len())
            .unwrap_or(0)
    }

    /// Smallest positive base count per inner measure.
    pub fn empirical_c(&self) -> Option<Rational> {
        self.rows
            .iter()
            .map(|r| r.bases.len())
            .min()
            .map(|c| int_rat(c) / &self.inner_measure)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda_coords,base_count,inner_measure_num,inner_measure_den\n");
        let scheme = self.gap_points.scheme();
        for r in &self.rows {
            let (a, b) = scheme.coords(&r.lambda);
            let _ = writeln!(
                out,
                "\"{a},{b}\",{},{},{}",
                r.bases.len(),
                self.inner_measure.numer(),
                self.inner_measure.denom()
            );
        }
        out
    }
}

/// The scan engine shared by every gap-set flavour.
pub fn scan_with_endos<S: Scheme>(
    scheme: &S,
    p_o: &PointSet<S>,
    inner: &S::Region,
    candidates: &PointSet<S>,
    endos: &[Endo<S::Point>],
    label: String,
) -> Result<GapSetReport<S>> {
    if endos.is_empty() {
        return Err(Error::usage("at least one displacement map is required"));
    }
    let disp: Vec<Vec<S::Point>> = candidates
        .points()
        .par_iter()
        .map(|l| displacements(scheme, endos, l))
        .collect();
    for (l, d) in candidates.iter().zip(&disp) {
        check_margin(scheme, p_o.region(), inner, l, d)?;
    }
    let base: Vec<&S::Point> = p_o.iter().filter(|x| scheme.in_region(inner, x)).collect();
    let rows: Vec<GapRow<S::Point>> = candidates
        .points()
        .par_iter()
        .zip(disp.par_iter())
        .filter_map(|(l, d)| {
            let bases: Vec<S::Point> = base
                .iter()
                .filter(|x| d.iter().all(|dk| p_o.contains(&scheme.add(x, dk))))
                .map(|x| (*x).clone())
                .collect();
            (!bases.is_empty()).then(|| GapRow {
                lambda: l.clone(),
                bases,
            })
        })
        .collect();
    let gap_points = PointSet::from_points(
        scheme.clone(),
        candidates.region().clone(),
        rows.iter().map(|r| r.lambda.clone()).collect(),
    );
    Ok(GapSetReport {
        label,
        inner: inner.clone(),
        inner_measure: scheme.measure(inner),
        candidates: candidates.len(),
        rows,
        gap_points,
    })
}

/// `S_F = { lambda : some x in P has x + lambda * F ⊂ P }` (or the
/// progression analogue), over the candidate set.
pub fn gap_set<S: Scheme>(
    scheme: &S,
    p_o: &PointSet<S>,
    inner: &S::Region,
    candidates: &PointSet<S>,
    query: &PatternQuery<S::Point>,
) -> Result<GapSetReport<S>> {
    scan_with_endos(scheme, p_o, inner, candidates, &query.endos(), query.label())
}

/// Gaps `lambda` with `x + k lambda in P` for `k = 1..=r`.
pub fn ap_scan<S: Scheme>(
    scheme: &S,
    p_o: &PointSet<S>,
    inner: &S::Region,
    candidates: &PointSet<S>,
    r: u32,
) -> Result<GapSetReport<S>> {
    gap_set(scheme, p_o, inner, candidates, &PatternQuery::multiples(r)?)
}

/// Base points `P ∩ ⋂ (P - a_k(lambda))`; each map must first send the
/// candidates into `Lambda(qW)`.
pub fn multi_recurrence_scan<S: Scheme>(
    scheme: &S,
    p_o: &PointSet<S>,
    inner: &S::Region,
    candidates: &PointSet<S>,
    endos: &[Endo<S::Point>],
    q: u64,
) -> Result<GapSetReport<S>> {
    let some: Vec<S::Point> = candidates.iter().take(16).cloned().collect();
    for e in endos {
        if !endo_additive(scheme, e, &some) {
            return Err(Error::usage(format!("{e} is not additive on the candidates")));
        }
        let check = endo_check(scheme, e, candidates, q)?;
        if let Some(bad) = check.violation {
            return Err(Error::usage(format!(
                "{e} sends lambda {bad} outside Lambda({q}W); smallest admissible q is {}",
                check.min_q
            )));
        }
    }
    let names: Vec<String> = endos.iter().map(|e| e.to_string()).collect();
    scan_with_endos(scheme, p_o, inner, candidates, endos, names.join(" "))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RecheckSummary {
    pub pairs: usize,
    pub failures: usize,
}

/// Re-verifies every reported `(lambda, x)` by evaluating the membership
/// rule directly, without the set index.
pub fn recheck_witnesses<S, F>(
    scheme: &S,
    report: &GapSetReport<S>,
    endos: &[Endo<S::Point>],
    member: F,
) -> RecheckSummary
where
    S: Scheme,
    F: Fn(&S::Point) -> bool + Sync,
{
    let (pairs, failures) = report
        .rows
        .par_iter()
        .map(|row| {
            let disp = displacements(scheme, endos, &row.lambda);
            let lambda_ok = scheme.in_lambda(&row.lambda);
            let bad = row
                .bases
                .iter()
                .filter(|x| {
                    !(lambda_ok
                        && scheme.in_region(&report.inner, x)
                        && member(x)
                        && disp.iter().all(|d| member(&scheme.add(x, d))))
                })
                .count();
            (row.bases.len(), bad)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    RecheckSummary { pairs, failures }
}

/// The `q`-fold sumset `P + ... + P`, by iterated pairwise sums.
pub fn sumset<S: Scheme>(scheme: &S, set: &PointSet<S>, q: u32, cap: u64) -> Result<PointSet<S>> {
    if q == 0 {
        return Err(Error::usage("sumset order q must be at least 1"));
    }
    let base_radius = scheme.region_radius(set.region());
    let base_center = scheme.region_center(set.region());
    let mut acc = set.clone();
    let mut radius = base_radius.clone();
    for k in 2..=q {
        let pairs = (acc.len() as u128) * (set.len() as u128);
        if pairs > cap as u128 {
            return Err(Error::Capacity {
                what: format!("{k}-fold sumset"),
                estimate: pairs.to_string(),
                cap,
            });
        }
        radius = scheme.radius_add(&radius, &base_radius);
        let center = scheme.scale(&base_center, &BigInt::from(k));
        let sums: HashSet<S::Point> = acc
            .points()
            .par_iter()
            .fold(HashSet::new, |mut h, x| {
                for y in set.iter() {
                    h.insert(scheme.add(x, y));
                }
                h
            })
            .reduce(HashSet::new, |mut a, b| {
                a.extend(b);
                a
            });
        acc = PointSet::from_points(
            scheme.clone(),
            scheme.ball(&center, &radius),
            sums.into_iter().collect(),
        );
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyndeticityRow<S: Scheme> {
    pub scale: String,
    /// `None` when `S` is empty (infinite radius).
    pub covering_radius: Option<S::Dist>,
    /// A point of `Lambda` at which the radius is attained.
    pub witness: Option<S::Point>,
    /// `{ lambda - s }` over nearest pairs, ordered by norm then coordinates.
    pub k_candidate: Vec<S::Point>,
}

/// How far `Lambda ∩ inner` strays from `S`: the largest nearest-point
/// distance and the offsets realising every nearest pair.
pub fn syndeticity<S: Scheme>(
    scheme: &S,
    s: &PointSet<S>,
    lambda: &PointSet<S>,
    inner: &S::Region,
    scale: String,
) -> Result<SyndeticityRow<S>> {
    if !s.is_subset_of(lambda) {
        return Err(Error::usage("syndeticity needs S contained in the Lambda set"));
    }
    if s.is_empty() {
        return Ok(SyndeticityRow {
            scale,
            covering_radius: None,
            witness: None,
            k_candidate: Vec::new(),
        });
    }
    let near: Vec<(S::Point, S::Dist, Vec<S::Point>)> = lambda
        .points()
        .par_iter()
        .filter(|l| scheme.in_region(inner, l))
        .filter_map(|l| scheme.nearest(s, l).map(|(d, ws)| (l.clone(), d, ws)))
        .collect();
    let mut best: Option<(&S::Dist, &S::Point)> = None;
    for (l, d, _) in &near {
        if best.is_none_or(|(bd, _)| d > bd) {
            best = Some((d, l));
        }
    }
    let mut k: Vec<S::Point> = near
        .iter()
        .flat_map(|(l, _, ws)| ws.iter().map(move |w| scheme.sub(l, w)))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    k.sort_by(|a, b| {
        scheme
            .norm(a)
            .cmp(&scheme.norm(b))
            .then_with(|| scheme.coords(a).cmp(&scheme.coords(b)))
    });
    Ok(SyndeticityRow {
        scale,
        covering_radius: best.map(|(d, _)| d.clone()),
        witness: best.map(|(_, l)| l.clone()),
        k_candidate: k,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyndeticityReport<S: Scheme> {
    pub rows: Vec<SyndeticityRow<S>>,
}

impl<S: Scheme> SyndeticityReport<S> {
    /// Radii never grow from one row to the next (an empty `S` counts as
    /// infinite).
    pub fn non_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| {
            match (&w[0].covering_radius, &w[1].covering_radius) {
                (_, None) => w[0].covering_radius.is_none(),
                (None, Some(_)) => true,
                (Some(a), Some(b)) => b.cmp(a) != Ordering::Greater,
            }
        })
    }

    pub fn to_csv(&self, scheme: &S) -> String {
        let mut out = String::from("scale,covering_radius,K_size\n");
        for r in &self.rows {
            let radius = r
                .covering_radius
                .as_ref()
                .map(|d| scheme.dist_exact(d))
                .unwrap_or_else(|| "inf".into());
            let _ = writeln!(out, "{},{},{}", r.scale, radius, r.k_candidate.len());
        }
        out
    }
}

/// Margin that keeps every displaced point of an inner base point inside
/// the enumerated region: the largest displacement plus the covering
/// radius of `Lambda` there.
pub fn default_margin<S: Scheme>(
    scheme: &S,
    lambda: &PointSet<S>,
    candidates: &PointSet<S>,
    endos: &[Endo<S::Point>],
) -> S::Radius {
    let reach = candidates
        .iter()
        .flat_map(|l| endos.iter().map(move |e| scheme.radius_of(&scheme.norm(&e.apply(scheme, l)))))
        .max_by(|a, b| scheme.cmp_radius(a, b))
        .unwrap_or_else(|| scheme.radius_zero());
    let cover = scheme
        .covering(lambda, lambda.region())
        .map(|c| scheme.radius_of(&c))
        .unwrap_or_else(|| scheme.radius_zero());
    scheme.radius_add(&reach, &cover)
}
