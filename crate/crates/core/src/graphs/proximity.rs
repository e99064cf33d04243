//! Sphere-of-influence, Gabriel and relative-neighbourhood graphs.
//!
//! SIG overlap is closed: tangent balls are joined. Gabriel and RNG blocking
//! regions are open: a point exactly on the boundary of the diametral ball or
//! the lune does not block.

use super::{GeoGraph, Triangulation};
use crate::error::{Error, Result};
use crate::spatial::{dist, dist2, PointSet, SpatialIndex};

// Range queries only prefilter; the exact predicates decide. Inflate the
// radius so rounding in sqrt never drops a candidate.
const RANGE_SLACK: f64 = 1.0 + 1e-9;

/// Sphere-of-influence graph: `r_x` is the distance from `x` to its nearest
/// neighbour and `x ~ y` iff `|x - y| <= r_x + r_y`.
pub fn sig(points: &PointSet) -> Result<GeoGraph> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InsufficientPoints {
            requested: 1,
            available: n.saturating_sub(1),
        });
    }
    let index = SpatialIndex::build(points);
    let radii: Vec<f64> = (0..n)
        .map(|i| index.k_nearest_of(i, 1).map(|nb| nb[0].distance))
        .collect::<Result<_>>()?;
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in index.range_query(points.point(i), (radii[i] + r_max) * RANGE_SLACK) {
            if j > i && sig_overlap(points, &radii, i, j) {
                pairs.push((i, j));
            }
        }
    }
    Ok(GeoGraph::undirected(points.clone(), pairs))
}

#[inline]
pub(crate) fn sig_overlap(points: &PointSet, radii: &[f64], i: usize, j: usize) -> bool {
    dist(points.point(i), points.point(j)) <= radii[i] + radii[j]
}

/// `z` lies strictly inside the ball with diameter `xy`.
#[inline]
pub(crate) fn blocks_gabriel(x: &[f64], y: &[f64], z: &[f64]) -> bool {
    x.iter()
        .zip(y)
        .zip(z)
        .map(|((a, b), c)| (c - a) * (c - b))
        .sum::<f64>()
        < 0.0
}

/// `z` lies strictly inside the lune `B(x; |x-y|) ∩ B(y; |x-y|)`.
#[inline]
pub(crate) fn blocks_rng(x: &[f64], y: &[f64], z: &[f64]) -> bool {
    let l2 = dist2(x, y);
    dist2(z, x) < l2 && dist2(z, y) < l2
}

/// Candidate pairs containing every Gabriel (hence RNG) edge.
fn candidates(points: &PointSet) -> Vec<(usize, usize)> {
    if points.dim() == 2 {
        if let Ok(tri) = Triangulation::new(points) {
            return tri.delaunay_graph_pairs();
        }
    }
    let n = points.len();
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Gabriel graph: `x ~ y` iff the open ball with diameter `xy` is empty.
pub fn gabriel(points: &PointSet) -> Result<GeoGraph> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints {
            requested: 1,
            available: points.len().saturating_sub(1),
        });
    }
    let index = SpatialIndex::build(points);
    let mut mid = vec![0.0; points.dim()];
    let pairs = candidates(points).into_iter().filter(|&(i, j)| {
        let (x, y) = (points.point(i), points.point(j));
        for k in 0..mid.len() {
            mid[k] = 0.5 * (x[k] + y[k]);
        }
        let r = 0.5 * dist(x, y) * RANGE_SLACK;
        !index
            .range_query(&mid, r)
            .into_iter()
            .any(|z| z != i && z != j && blocks_gabriel(x, y, points.point(z)))
    });
    let pairs: Vec<_> = pairs.collect();
    Ok(GeoGraph::undirected(points.clone(), pairs))
}

/// Relative neighbourhood graph: `x ~ y` iff no point is strictly closer to
/// both `x` and `y` than they are to each other.
pub fn rng_graph(points: &PointSet) -> Result<GeoGraph> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints {
            requested: 1,
            available: points.len().saturating_sub(1),
        });
    }
    let index = SpatialIndex::build(points);
    let pairs: Vec<_> = candidates(points)
        .into_iter()
        .filter(|&(i, j)| {
            let (x, y) = (points.point(i), points.point(j));
            let r = dist(x, y) * RANGE_SLACK;
            !index
                .range_query(x, r)
                .into_iter()
                .any(|z| z != i && z != j && blocks_rng(x, y, points.point(z)))
        })
        .collect();
    Ok(GeoGraph::undirected(points.clone(), pairs))
}
