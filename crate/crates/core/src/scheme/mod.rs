//! Cut-and-project schemes, exact enumeration of `Lambda ∩ region`, and
//! the finite-scale approximate-lattice axiom checks.
//!
//! Two schemes are instantiated: [`QuadScheme`] (`G = H = R`, lattice
//! `{(x, x*)}` for `x` in `Z[sqrt D]`) and [`PadicScheme`] (`G = Q_p`,
//! `H = R`, lattice the diagonal image of `Z[1/p]`). Everything above this
//! module is generic over the [`Scheme`] trait.

mod axioms;
mod padic;
mod pointset;
mod quad;

pub use axioms::{verify_axioms, AxiomReport};
pub use padic::{PadicNorm, PadicRegion, PadicScheme};
pub use pointset::PointSet;
pub use quad::{QuadRegion, QuadScheme};

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use rand::RngCore;

use crate::error::Result;
use crate::exactnum::{Rational, SurdValue};

/// Default cap on the estimated point count of a single enumeration.
pub const DEFAULT_POINT_CAP: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    Quadratic,
    Padic,
}

/// A cut-and-project scheme with a symmetric interval window `W = [-w, w]`
/// (or its interior) in the internal space `R`.
///
/// `Dist` is an exact distance in `G`; `Radius` is the parameter type used
/// for region extents, margins and search radii (a rational half-width for
/// `R`, an integer level `l` for the ball `p^{-l} Z_p`).
pub trait Scheme: Clone + fmt::Debug + Send + Sync + 'static {
    type Point: Clone + Eq + Hash + Ord + Send + Sync + fmt::Debug + fmt::Display;
    type Region: Clone + fmt::Debug + PartialEq + Send + Sync;
    type Dist: Clone + Ord + fmt::Debug + fmt::Display + Send + Sync;
    type Radius: Clone + fmt::Debug + fmt::Display + Send + Sync;

    fn kind(&self) -> SchemeKind;
    fn window(&self) -> &Rational;
    fn window_closed(&self) -> bool;
    /// Same lattice, different window.
    fn with_window(&self, w: Rational, closed: bool) -> Self;

    fn zero(&self) -> Self::Point;
    fn from_int(&self, k: i64) -> Self::Point;
    fn add(&self, x: &Self::Point, y: &Self::Point) -> Self::Point;
    fn sub(&self, x: &Self::Point, y: &Self::Point) -> Self::Point;
    fn neg(&self, x: &Self::Point) -> Self::Point;
    fn mul(&self, x: &Self::Point, y: &Self::Point) -> Self::Point;
    fn scale(&self, x: &Self::Point, k: &BigInt) -> Self::Point;
    /// Absolute value with respect to the real embedding.
    fn abs(&self, x: &Self::Point) -> Self::Point;

    /// `|x*| <= bound` (or `<` when `strict`).
    fn star_within(&self, x: &Self::Point, bound: &Rational, strict: bool) -> bool;
    fn cmp_star_abs(&self, x: &Self::Point, y: &Self::Point) -> Ordering;
    fn star_abs_value(&self, x: &Self::Point) -> SurdValue;

    fn in_lambda(&self, x: &Self::Point) -> bool {
        self.star_within(x, self.window(), !self.window_closed())
    }

    /// Window test against `qW`, the cut-and-project superset of `Lambda^q`.
    fn in_lambda_q(&self, x: &Self::Point, q: u64) -> bool {
        let bound = self.window() * Rational::from_integer(BigInt::from(q));
        self.star_within(x, &bound, !self.window_closed())
    }

    /// Smallest `q >= 1` with `in_lambda_q(x, q)`.
    fn min_q(&self, x: &Self::Point) -> BigInt {
        let ratio = self.star_abs_value(x).scale(&self.window().recip());
        let mut q = ratio.floor().max(BigInt::from(1));
        loop {
            let bound = self.window() * Rational::from_integer(q.clone());
            if self.star_within(x, &bound, !self.window_closed()) {
                return q;
            }
            q += 1;
        }
    }

    fn ball(&self, center: &Self::Point, radius: &Self::Radius) -> Self::Region;
    fn region_center(&self, region: &Self::Region) -> Self::Point;
    fn region_radius(&self, region: &Self::Region) -> Self::Radius;
    fn in_region(&self, region: &Self::Region, x: &Self::Point) -> bool;
    /// Haar measure (Lebesgue length, or `p^level` with `m(Z_p) = 1`).
    fn measure(&self, region: &Self::Region) -> Rational;
    /// The region shrunk by `margin`, or `None` if nothing is left.
    fn shrink(&self, region: &Self::Region, margin: &Self::Radius) -> Option<Self::Region>;
    fn grow(&self, region: &Self::Region, by: &Self::Radius) -> Self::Region;
    /// `inner + ball(slack) ⊆ outer`.
    fn region_within(&self, inner: &Self::Region, outer: &Self::Region, slack: &Self::Radius)
        -> bool;
    /// Upper bound on `|Lambda ∩ region|`, computed without enumerating.
    fn count_estimate(&self, region: &Self::Region) -> BigInt;
    /// All points of `Lambda ∩ region`, in no particular order.
    fn enumerate_points(&self, region: &Self::Region) -> Vec<Self::Point>;

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> Self::Dist;
    fn norm(&self, x: &Self::Point) -> Self::Dist {
        self.dist(x, &self.zero())
    }
    fn dist_within(&self, d: &Self::Dist, r: &Self::Radius) -> bool;
    /// A radius `r` with `dist_within(d, r)`, as small as the radius grid allows.
    fn radius_of(&self, d: &Self::Dist) -> Self::Radius;
    /// Radius bound for a sum of displacements (triangle inequality).
    fn radius_add(&self, a: &Self::Radius, b: &Self::Radius) -> Self::Radius;
    fn radius_zero(&self) -> Self::Radius;
    fn cmp_radius(&self, a: &Self::Radius, b: &Self::Radius) -> Ordering;
    fn dist_decimal(&self, d: &Self::Dist) -> String;
    /// Exact text form of a distance: `m+n*sqrt(D)` or a ball level.
    fn dist_exact(&self, d: &Self::Dist) -> String;
    /// A radius `v` on the rational grid whose ball `V` has `V - V` missing
    /// every point at distance `gap` (for `R`: `2v <= gap`).
    fn separating_radius(&self, gap: &Self::Dist) -> Self::Radius;
    /// Whether `ball(v) - ball(v)` meets a gap of this size only on its
    /// boundary (a null set) or not at all.
    fn gap_separated(&self, gap: &Self::Dist, v: &Self::Radius) -> bool;

    /// Points of `set` within `radius` of `center`, ascending.
    fn ball_points(
        &self,
        set: &PointSet<Self>,
        center: &Self::Point,
        radius: &Self::Radius,
    ) -> Vec<Self::Point>;
    /// Distance from `x` to `set` and every point realising it.
    fn nearest(&self, set: &PointSet<Self>, x: &Self::Point)
        -> Option<(Self::Dist, Vec<Self::Point>)>;
    /// Minimal distance between distinct points of the sorted slice.
    fn min_gap(&self, sorted: &[Self::Point]) -> Option<Self::Dist>;
    /// Relative-denseness witness of `set` inside `region`: the largest gap
    /// between consecutive points for `R`, the smallest ball level every
    /// sub-ball of `region` meets for `Q_p`.
    fn covering(&self, set: &PointSet<Self>, region: &Self::Region) -> Option<Self::Dist>;
    /// Largest count over windows of the given extent inside `ambient`, with
    /// the window measure. `None` if no window fits.
    fn max_window(
        &self,
        set: &PointSet<Self>,
        ambient: &Self::Region,
        extent: &Self::Radius,
    ) -> Option<(usize, Rational)>;
    fn sample_region(
        &self,
        rng: &mut dyn RngCore,
        ambient: &Self::Region,
        max_extent: &Self::Radius,
    ) -> Self::Region;
    /// Measure of `(set + ball(v)) ∩ region`, exactly.
    fn thickening_measure(
        &self,
        set: &PointSet<Self>,
        region: &Self::Region,
        v: &Self::Radius,
    ) -> SurdValue;

    /// Integer coordinates: `(m, n)` or `(a, k)`.
    fn coords(&self, x: &Self::Point) -> (BigInt, BigInt);
    fn from_coords(&self, a: BigInt, b: BigInt) -> Result<Self::Point>;
    fn parse_radius(&self, s: &str) -> Result<Self::Radius>;
    fn region_label(&self, region: &Self::Region) -> String;
}

/// Enumerates `Lambda ∩ region`, refusing before allocation when the
/// estimated count exceeds `cap`.
pub fn enumerate<S: Scheme>(scheme: &S, region: &S::Region, cap: u64) -> Result<PointSet<S>> {
    let estimate = scheme.count_estimate(region);
    if estimate > BigInt::from(cap) {
        return Err(crate::error::Error::Capacity {
            what: format!("enumeration of {}", scheme.region_label(region)),
            estimate: estimate.to_string(),
            cap,
        });
    }
    Ok(PointSet::from_points(
        scheme.clone(),
        region.clone(),
        scheme.enumerate_points(region),
    ))
}

/// Parses `"x,y"` into scheme coordinates.
pub fn parse_point<S: Scheme>(scheme: &S, s: &str) -> Result<S::Point> {
    let bad = || {
        crate::error::Error::from(crate::error::ArithError::Parse {
            what: "point coordinates",
            input: s.to_string(),
        })
    };
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let a: BigInt = a.trim().parse().map_err(|_| bad())?;
    let b: BigInt = b.trim().parse().map_err(|_| bad())?;
    scheme.from_coords(a, b)
}
