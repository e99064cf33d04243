//! Euler characteristic of a union of closed disks through its nerve.
//!
//! The nerve has a simplex for every subset of disks with a common point; by
//! the nerve theorem its Euler characteristic equals that of the union. In
//! the plane, a family of convex sets has a common point iff every three of
//! them do (Helly), so a subset is extended one disk at a time and each
//! extension only needs the new triples checked.

use crate::error::{Error, Result};

/// Largest simplex the enumeration will visit.
pub const MAX_SIMPLEX: usize = 20;

const REL_EPS: f64 = 1e-12;

/// Euler characteristic of the union of `disks`, whose intersection graph is
/// given by the (symmetric) adjacency lists `adj`.
pub fn euler_characteristic(disks: &[([f64; 2], f64)], adj: &[Vec<usize>]) -> Result<i64> {
    let n = disks.len();
    let mut chi = 0i64;
    let mut stack = Vec::with_capacity(MAX_SIMPLEX);
    for v in 0..n {
        stack.clear();
        stack.push(v);
        let cands: Vec<usize> = adj[v].iter().copied().filter(|&u| u > v).collect();
        extend(disks, adj, &mut stack, &cands, &mut chi)?;
    }
    Ok(chi)
}

fn extend(
    disks: &[([f64; 2], f64)],
    adj: &[Vec<usize>],
    simplex: &mut Vec<usize>,
    cands: &[usize],
    chi: &mut i64,
) -> Result<()> {
    *chi += if simplex.len() % 2 == 1 { 1 } else { -1 };
    for (pos, &u) in cands.iter().enumerate() {
        let ok = simplex.iter().enumerate().all(|(a, &i)| {
            simplex[a + 1..].iter().all(|&j| triple_meets(disks[i], disks[j], disks[u]))
        });
        if !ok {
            continue;
        }
        if simplex.len() == MAX_SIMPLEX {
            return Err(Error::SupercriticalClump { size: MAX_SIMPLEX + 1 });
        }
        let next: Vec<usize> = cands[pos + 1..]
            .iter()
            .copied()
            .filter(|w| adj[u].binary_search(w).is_ok())
            .collect();
        simplex.push(u);
        extend(disks, adj, simplex, &next, chi)?;
        simplex.pop();
    }
    Ok(())
}

fn inside(p: [f64; 2], (c, r): ([f64; 2], f64)) -> bool {
    (p[0] - c[0]).hypot(p[1] - c[1]) <= r * (1.0 + REL_EPS)
}

/// Whether three closed disks share a point. A nonempty intersection of disks
/// contains a whole disk (hence its center) or has a corner where two of the
/// circles cross, so those are the only candidates.
pub(crate) fn triple_meets(a: ([f64; 2], f64), b: ([f64; 2], f64), c: ([f64; 2], f64)) -> bool {
    let all = |p: [f64; 2]| inside(p, a) && inside(p, b) && inside(p, c);
    if [a, b, c].iter().any(|d| all(d.0)) {
        return true;
    }
    for (x, y) in [(a, b), (a, c), (b, c)] {
        for p in circle_crossings(x, y) {
            if all(p) {
                return true;
            }
        }
    }
    false
}

fn circle_crossings((c1, r1): ([f64; 2], f64), (c2, r2): ([f64; 2], f64)) -> Vec<[f64; 2]> {
    let (dx, dy) = (c2[0] - c1[0], c2[1] - c1[1]);
    let d = dx.hypot(dy);
    if d == 0.0 || d > r1 + r2 || d < (r1 - r2).abs() {
        return Vec::new();
    }
    let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let (ux, uy) = (dx / d, dy / d);
    let m = [c1[0] + a * ux, c1[1] + a * uy];
    vec![[m[0] - h * uy, m[1] + h * ux], [m[0] + h * uy, m[1] - h * ux]]
}
