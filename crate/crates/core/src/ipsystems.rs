//! Finite IP-systems `phi(alpha) = sum of h_k over k in alpha`, model sets
//! with shrunk open windows `(1/n) W°` and the search for dilated patterns
//! `p + j delta F` inside a subset.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::int_rat;
use crate::patterns::{check_margin, find_base_points, sumset, Endo};
use crate::scheme::{enumerate, PointSet, Scheme};

#[derive(Clone, Debug, PartialEq)]
pub struct IpSystem<P> {
    gens: Vec<P>,
}

impl<P: Clone + Ord + std::fmt::Display> IpSystem<P> {
    /// Generators must be positive in the real embedding.
    pub fn new<S: Scheme<Point = P>>(scheme: &S, gens: Vec<P>) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::usage("an IP-system needs at least one generator"));
        }
        if let Some(bad) = gens.iter().find(|h| **h <= scheme.zero()) {
            return Err(Error::usage(format!("generator {bad} is not positive")));
        }
        Ok(IpSystem { gens })
    }

    pub fn n(&self) -> usize {
        self.gens.len()
    }

    /// `phi(alpha)` for `alpha ⊆ {1..n}` given as 1-based indices.
    pub fn eval<S: Scheme<Point = P>>(&self, scheme: &S, alpha: &[usize]) -> Result<P> {
        let mut seen = vec![false; self.n()];
        let mut acc = scheme.zero();
        for &k in alpha {
            if k == 0 || k > self.n() {
                return Err(Error::usage(format!("index {k} outside 1..={}", self.n())));
            }
            if std::mem::replace(&mut seen[k - 1], true) {
                return Err(Error::usage(format!("index {k} repeated")));
            }
            acc = scheme.add(&acc, &self.gens[k - 1]);
        }
        Ok(acc)
    }

    /// `phi` of the subset whose bit `k - 1` is set.
    pub fn eval_mask<S: Scheme<Point = P>>(&self, scheme: &S, mask: u64) -> Result<P> {
        let alpha: Vec<usize> = (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
        self.eval(scheme, &alpha)
    }
}

/// `Delta_n`: the same lattice with the open window `(1/n) W°`.
#[derive(Clone, Debug)]
pub struct ShrunkScheme<S: Scheme> {
    pub base: S,
    pub n: u32,
    pub shrunk: S,
}

impl<S: Scheme> ShrunkScheme<S> {
    pub fn new(base: &S, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::usage("shrink factor n must be at least 1"));
        }
        let w = base.window() / int_rat(n);
        Ok(ShrunkScheme {
            base: base.clone(),
            n,
            shrunk: base.with_window(w, false),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerReport {
    pub points: usize,
    pub sums: usize,
    /// `n`-fold sums outside the base set `Lambda`.
    pub violations: usize,
    /// `n`-fold sums with `|x*| >= w`.
    pub strict_violations: usize,
}

/// Enumerates `Delta_n ∩ region`, forms its exact `n`-fold sumset and
/// tests every sum against the base window.
pub fn verify_power_containment<S: Scheme>(
    sh: &ShrunkScheme<S>,
    region: &S::Region,
    cap: u64,
) -> Result<PowerReport> {
    let set = enumerate(&sh.shrunk, region, cap)?;
    let sums = sumset(&sh.shrunk, &set, sh.n, cap)?;
    let w = sh.base.window();
    Ok(PowerReport {
        points: set.len(),
        sums: sums.len(),
        violations: sums.iter().filter(|x| !sh.base.in_lambda(x)).count(),
        strict_violations: sums
            .iter()
            .filter(|x| !sh.base.star_within(x, w, true))
            .count(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IpHit<P> {
    pub j: u32,
    pub p0: P,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IpSearch<P> {
    /// `|delta|`, the step actually searched.
    pub delta: P,
    pub hit: Option<IpHit<P>>,
    pub scale_note: String,
}

impl<P: Clone> IpSearch<P> {
    pub fn to_json<S: Scheme<Point = P>>(&self, scheme: &S, verified: bool) -> Value {
        let c = |x: &P| {
            let (a, b) = scheme.coords(x);
            let n = |v: BigInt| v.to_i64().map_or_else(|| json!(v.to_string()), |i| json!(i));
            json!([n(a), n(b)])
        };
        match &self.hit {
            Some(h) => json!({
                "delta": c(&self.delta),
                "j": h.j,
                "p0": c(&h.p0),
                "verified": verified,
            }),
            None => json!({ "found": false, "scale_note": self.scale_note }),
        }
    }
}

/// Smallest `j` in `1..=n` (then the first `p0` in canonical order) with
/// `p0 + j delta f in P` for every `f`. A negative `delta` is replaced by
/// `|delta|`, which lies in `Delta_n` as well.
pub fn ip_pattern_search<S: Scheme>(
    sh: &ShrunkScheme<S>,
    p_o: &PointSet<S>,
    inner: &S::Region,
    delta: &S::Point,
    pattern: &[S::Point],
) -> Result<IpSearch<S::Point>> {
    let scheme = &sh.base;
    if pattern.is_empty() {
        return Err(Error::usage("pattern must be nonempty"));
    }
    if *delta == scheme.zero() {
        return Err(Error::usage("delta must be nonzero"));
    }
    let delta = scheme.abs(delta);
    if !sh.shrunk.in_lambda(&delta) {
        return Err(Error::usage(format!(
            "delta {delta} is not in the shrunk set for n = {}",
            sh.n
        )));
    }
    let endos: Vec<Endo<S::Point>> = pattern.iter().cloned().map(Endo::MultBy).collect();
    let widest = scheme.scale(&delta, &BigInt::from(sh.n));
    let reach: Vec<S::Point> = endos.iter().map(|e| e.apply(scheme, &widest)).collect();
    check_margin(scheme, p_o.region(), inner, &widest, &reach)?;
    for j in 1..=sh.n {
        let step = scheme.scale(&delta, &BigInt::from(j));
        let bases = find_base_points(scheme, p_o, inner, &step, &endos)?;
        if let Some(p0) = bases.into_iter().next() {
            return Ok(IpSearch {
                delta,
                hit: Some(IpHit { j, p0 }),
                scale_note: String::new(),
            });
        }
    }
    Ok(IpSearch {
        delta,
        hit: None,
        scale_note: format!(
            "no j in 1..={} works inside {}; a finite-scale verdict only",
            sh.n,
            scheme.region_label(inner)
        ),
    })
}

/// Re-verifies a hit with a membership rule, not the set index.
pub fn recheck_ip_hit<S, F>(scheme: &S, search: &IpSearch<S::Point>, pattern: &[S::Point], member: F) -> bool
where
    S: Scheme,
    F: Fn(&S::Point) -> bool,
{
    match &search.hit {
        None => true,
        Some(h) => {
            let step = scheme.scale(&search.delta, &BigInt::from(h.j));
            member(&h.p0)
                && pattern
                    .iter()
                    .all(|f| member(&scheme.add(&h.p0, &scheme.mul(&step, f))))
        }
    }
}
