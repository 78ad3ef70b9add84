use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::Scheme;

/// A finite, deduplicated set of scheme points inside a region.
///
/// Points are kept in ascending canonical order (by real value) next to a
/// hash index for exact membership. Immutable once built.
#[derive(Clone, Debug)]
pub struct PointSet<S: Scheme> {
    scheme: S,
    region: S::Region,
    points: Vec<S::Point>,
    index: HashSet<S::Point>,
}

impl<S: Scheme> PointSet<S> {
    pub fn from_points(scheme: S, region: S::Region, mut points: Vec<S::Point>) -> Self {
        points.par_sort_unstable();
        points.dedup();
        let index = points.iter().cloned().collect();
        PointSet {
            scheme,
            region,
            points,
            index,
        }
    }

    pub fn empty(scheme: S, region: S::Region) -> Self {
        Self::from_points(scheme, region, Vec::new())
    }

    pub fn scheme(&self) -> &S {
        &self.scheme
    }

    pub fn region(&self) -> &S::Region {
        &self.region
    }

    pub fn points(&self) -> &[S::Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: &S::Point) -> bool {
        self.index.contains(x)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, S::Point> {
        self.points.iter()
    }

    /// Subset satisfying `keep`, over the same region.
    pub fn filter<F>(&self, keep: F) -> Self
    where
        F: Fn(&S::Point) -> bool + Sync,
    {
        let points = self.points.par_iter().filter(|x| keep(x)).cloned().collect();
        Self::from_points(self.scheme.clone(), self.region.clone(), points)
    }

    /// The points lying in `region`, re-labelled with that region.
    pub fn restrict(&self, region: &S::Region) -> Self {
        let points = self
            .points
            .par_iter()
            .filter(|x| self.scheme.in_region(region, x))
            .cloned()
            .collect();
        Self::from_points(self.scheme.clone(), region.clone(), points)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.points.iter().all(|x| other.contains(x))
    }

    /// CSV with header; rows are exact integer coordinates in canonical order.
    pub fn to_csv(&self) -> String {
        let header = match self.scheme.kind() {
            super::SchemeKind::Quadratic => "m,n",
            super::SchemeKind::Padic => "a,k",
        };
        let mut out = String::with_capacity(16 * (self.points.len() + 1));
        out.push_str(header);
        out.push('\n');
        for x in &self.points {
            let (a, b) = self.scheme.coords(x);
            let _ = writeln!(out, "{a},{b}");
        }
        out
    }
}
