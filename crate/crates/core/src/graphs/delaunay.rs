//! Incremental Delaunay triangulation in the plane.
//!
//! Bowyer–Watson insertion over a triangle mesh closed by ghost triangles
//! (one per hull edge, sharing a vertex at infinity). Points are inserted in
//! Hilbert order and located by a randomized visibility walk from the last
//! created triangle. Orientation and in-circle signs come from adaptive exact
//! predicates, so the result is deterministic and never self-inconsistent.

use std::collections::BTreeSet;

use robust::{incircle, orient2d, Coord};

use crate::error::{Error, Result};
use crate::spatial::{lex_cmp, PointSet};

const GHOST: u32 = u32::MAX;
const NONE: u32 = u32::MAX;

#[inline]
fn coord(p: &[f64]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

pub(crate) fn orient(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    orient2d(coord(a), coord(b), coord(c))
}

pub(crate) fn in_circle(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
    incircle(coord(a), coord(b), coord(c), coord(d))
}

/// A Delaunay triangulation of a planar point set.
#[derive(Debug, Clone)]
pub struct Triangulation {
    points: PointSet,
    /// Finite triangles, counter-clockwise.
    triangles: Vec<[usize; 3]>,
    /// `neighbors[t][k]` is the triangle across the edge opposite vertex `k`,
    /// or `None` on the convex hull.
    neighbors: Vec<[Option<usize>; 3]>,
}

struct Mesh<'a> {
    pts: &'a PointSet,
    tris: Vec<[u32; 3]>,
    nbrs: Vec<[u32; 3]>,
    alive: Vec<bool>,
    stamp: Vec<u32>,
    free: Vec<u32>,
    last: u32,
    walk_seed: u32,
}

impl Triangulation {
    /// Triangulates `points` (which must be 2D, duplicate-free and not all
    /// collinear).
    pub fn new(points: &PointSet) -> Result<Self> {
        if points.dim() != 2 {
            return Err(Error::arg("Delaunay triangulation is only available in the plane"));
        }
        let n = points.len();
        if n < 3 {
            return Err(Error::Degenerate(format!("{n} points cannot be triangulated")));
        }
        check_duplicates(points)?;
        let order = hilbert_order(points);

        let a = order[0];
        let b = order[1];
        let c_pos = order
            .iter()
            .position(|&c| orient(points.point(a), points.point(b), points.point(c)) != 0.0)
            .ok_or_else(|| Error::Degenerate("all points are collinear".into()))?;
        let c = order[c_pos];

        let mut mesh = Mesh::new(points, a, b, c);
        for &p in order.iter().skip(2) {
            if p != c {
                mesh.insert(p as u32);
            }
        }
        Ok(mesh.finish())
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn neighbors(&self) -> &[[Option<usize>; 3]] {
        &self.neighbors
    }

    /// Undirected Delaunay edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut set = BTreeSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (u, v) = (t[(k + 1) % 3], t[(k + 2) % 3]);
                set.insert((u.min(v), u.max(v)));
            }
        }
        set.into_iter().collect()
    }

    /// Triangulation edges plus every pair of vertices sharing an empty
    /// circumcircle with four or more cocircular points. In general position
    /// this is just [`Triangulation::edges`]; in degenerate position it is the
    /// full Delaunay graph, independent of which diagonals were triangulated.
    pub fn delaunay_graph_pairs(&self) -> Vec<(usize, usize)> {
        let mut set: BTreeSet<(usize, usize)> = self.edges().into_iter().collect();
        let nt = self.triangles.len();
        let mut group = vec![usize::MAX; nt];
        for start in 0..nt {
            if group[start] != usize::MAX {
                continue;
            }
            group[start] = start;
            let mut members = vec![start];
            let mut stack = vec![start];
            while let Some(t) = stack.pop() {
                let [a, b, c] = self.triangles[t];
                for k in 0..3 {
                    let Some(nb) = self.neighbors[t][k] else { continue };
                    if group[nb] != usize::MAX {
                        continue;
                    }
                    let opp = self.triangles[nb]
                        .iter()
                        .copied()
                        .find(|v| ![a, b, c].contains(v))
                        .expect("neighbouring triangles share an edge");
                    let p = &self.points;
                    if in_circle(p.point(a), p.point(b), p.point(c), p.point(opp)) == 0.0 {
                        group[nb] = start;
                        members.push(nb);
                        stack.push(nb);
                    }
                }
            }
            if members.len() > 1 {
                let verts: BTreeSet<usize> = members.iter().flat_map(|&t| self.triangles[t]).collect();
                let verts: Vec<usize> = verts.into_iter().collect();
                for (i, &u) in verts.iter().enumerate() {
                    for &v in &verts[i + 1..] {
                        set.insert((u, v));
                    }
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn circumcenter(&self, t: usize) -> [f64; 2] {
        let [a, b, c] = self.triangles[t];
        circumcenter(self.points.point(a), self.points.point(b), self.points.point(c))
    }
}

pub(crate) fn circumcenter(a: &[f64], b: &[f64], c: &[f64]) -> [f64; 2] {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    [a[0] + (cy * b2 - by * c2) / d, a[1] + (bx * c2 - cx * b2) / d]
}

pub(crate) fn check_duplicates(points: &PointSet) -> Result<()> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| lex_cmp(points.point(a), points.point(b)).then(a.cmp(&b)));
    for w in idx.windows(2) {
        if points.point(w[0]) == points.point(w[1]) {
            return Err(Error::DuplicatePoints(w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    Ok(())
}

fn hilbert_order(points: &PointSet) -> Vec<usize> {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points.iter() {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    const SIDE: u32 = 1 << 16;
    let keys: Vec<u64> = points
        .iter()
        .map(|p| {
            let gx = (((p[0] - lo[0]) / span) * (SIDE - 1) as f64) as u32;
            let gy = (((p[1] - lo[1]) / span) * (SIDE - 1) as f64) as u32;
            hilbert_key(SIDE, gx, gy)
        })
        .collect();
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by_key(|&i| (keys[i], i));
    idx
}

fn hilbert_key(side: u32, mut x: u32, mut y: u32) -> u64 {
    let mut d: u64 = 0;
    let mut s = side / 2;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += u64::from(s) * u64::from(s) * u64::from((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = side - 1 - x;
                y = side - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

impl<'a> Mesh<'a> {
    fn new(pts: &'a PointSet, a: usize, b: usize, c: usize) -> Self {
        let (a, b, c) = (a as u32, b as u32, c as u32);
        let (b, c) = if orient(pts.point(a as usize), pts.point(b as usize), pts.point(c as usize)) > 0.0 {
            (b, c)
        } else {
            (c, b)
        };
        let mut m = Mesh {
            pts,
            tris: Vec::with_capacity(2 * pts.len() + 8),
            nbrs: Vec::with_capacity(2 * pts.len() + 8),
            alive: Vec::with_capacity(2 * pts.len() + 8),
            stamp: Vec::with_capacity(2 * pts.len() + 8),
            free: Vec::new(),
            last: 0,
            walk_seed: 0x9e37_79b9,
        };
        // 0: finite; 1..=3: ghosts across (a,b), (b,c), (c,a)
        m.push([a, b, c], [2, 3, 1]);
        m.push([b, a, GHOST], [3, 2, 0]);
        m.push([c, b, GHOST], [1, 3, 0]);
        m.push([a, c, GHOST], [2, 1, 0]);
        m
    }

    fn push(&mut self, t: [u32; 3], n: [u32; 3]) -> u32 {
        self.tris.push(t);
        self.nbrs.push(n);
        self.alive.push(true);
        self.stamp.push(0);
        (self.tris.len() - 1) as u32
    }

    #[inline]
    fn p(&self, v: u32) -> &[f64] {
        self.pts.point(v as usize)
    }

    #[inline]
    fn is_ghost(&self, t: u32) -> bool {
        self.tris[t as usize][2] == GHOST
    }

    fn conflicts(&self, t: u32, p: u32) -> bool {
        let [a, b, c] = self.tris[t as usize];
        let pp = self.p(p);
        if c == GHOST {
            let (pa, pb) = (self.p(a), self.p(b));
            let o = orient(pa, pb, pp);
            if o > 0.0 {
                return true;
            }
            if o < 0.0 {
                return false;
            }
            // collinear with the hull edge: in conflict only strictly inside it
            let dot_a = (pp[0] - pa[0]) * (pb[0] - pa[0]) + (pp[1] - pa[1]) * (pb[1] - pa[1]);
            let dot_b = (pp[0] - pb[0]) * (pa[0] - pb[0]) + (pp[1] - pb[1]) * (pa[1] - pb[1]);
            return dot_a > 0.0 && dot_b > 0.0;
        }
        in_circle(self.p(a), self.p(b), self.p(c), pp) > 0.0
    }

    fn next_rand(&mut self) -> u32 {
        self.walk_seed ^= self.walk_seed << 13;
        self.walk_seed ^= self.walk_seed >> 17;
        self.walk_seed ^= self.walk_seed << 5;
        self.walk_seed
    }

    fn locate(&mut self, p: u32) -> u32 {
        let mut t = self.last;
        if !self.alive[t as usize] || self.is_ghost(t) {
            t = (0..self.tris.len() as u32)
                .find(|&i| self.alive[i as usize] && !self.is_ghost(i))
                .expect("mesh has a finite triangle");
        }
        let pp = self.pts.point(p as usize);
        'walk: loop {
            if self.is_ghost(t) {
                return t;
            }
            let start = self.next_rand() % 3;
            let tri = self.tris[t as usize];
            for j in 0..3 {
                let k = ((start + j) % 3) as usize;
                let (u, v) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                if orient(self.p(u), self.p(v), pp) < 0.0 {
                    t = self.nbrs[t as usize][k];
                    continue 'walk;
                }
            }
            return t;
        }
    }

    fn insert(&mut self, p: u32) {
        let start = self.locate(p);
        debug_assert!(self.conflicts(start, p));
        let mark = p.wrapping_add(1);

        let mut cavity = vec![start];
        self.stamp[start as usize] = mark;
        // (u, v, outside triangle)
        let mut boundary: Vec<(u32, u32, u32)> = Vec::new();
        let mut i = 0;
        while i < cavity.len() {
            let t = cavity[i];
            i += 1;
            let tri = self.tris[t as usize];
            for k in 0..3 {
                let nb = self.nbrs[t as usize][k];
                if self.stamp[nb as usize] == mark {
                    continue;
                }
                if self.conflicts(nb, p) {
                    self.stamp[nb as usize] = mark;
                    cavity.push(nb);
                } else {
                    boundary.push((tri[(k + 1) % 3], tri[(k + 2) % 3], nb));
                }
            }
        }

        for &t in &cavity {
            self.alive[t as usize] = false;
            self.free.push(t);
        }

        let mut created: Vec<u32> = Vec::with_capacity(boundary.len());
        for &(u, v, nb) in &boundary {
            let id = match self.free.pop() {
                Some(id) => {
                    self.tris[id as usize] = [u, v, p];
                    self.nbrs[id as usize] = [NONE, NONE, nb];
                    self.alive[id as usize] = true;
                    id
                }
                None => self.push([u, v, p], [NONE, NONE, nb]),
            };
            // this slot is dead for the rest of the insertion
            self.stamp[id as usize] = 0;
            let onb = self.tris[nb as usize];
            let slot = (0..3).find(|&s| onb[s] != u && onb[s] != v).expect("shared edge");
            self.nbrs[nb as usize][slot] = id;
            created.push(id);
        }

        // Link new triangles around p: edge (v,p) of the triangle on (u,v)
        // is shared with the triangle whose boundary edge starts at v.
        for (a, &(_, v, _)) in boundary.iter().enumerate() {
            let b = boundary.iter().position(|&(u2, _, _)| u2 == v).expect("cavity boundary is a cycle");
            self.nbrs[created[a] as usize][0] = created[b];
            self.nbrs[created[b] as usize][1] = created[a];
        }

        for &id in &created {
            let t = self.tris[id as usize];
            let r = if t[0] == GHOST {
                1
            } else if t[1] == GHOST {
                2
            } else {
                0
            };
            if r != 0 {
                let n = self.nbrs[id as usize];
                self.tris[id as usize] = [t[r], t[(r + 1) % 3], t[(r + 2) % 3]];
                self.nbrs[id as usize] = [n[r], n[(r + 1) % 3], n[(r + 2) % 3]];
            } else {
                self.last = id;
            }
        }
    }

    fn finish(self) -> Triangulation {
        let mut remap = vec![usize::MAX; self.tris.len()];
        let mut triangles = Vec::new();
        for (i, t) in self.tris.iter().enumerate() {
            if self.alive[i] && t[2] != GHOST {
                remap[i] = triangles.len();
                triangles.push([t[0] as usize, t[1] as usize, t[2] as usize]);
            }
        }
        let mut neighbors = vec![[None; 3]; triangles.len()];
        for (i, t) in self.tris.iter().enumerate() {
            if remap[i] == usize::MAX || t[2] == GHOST {
                continue;
            }
            for k in 0..3 {
                let nb = remap[self.nbrs[i][k] as usize];
                neighbors[remap[i]][k] = (nb != usize::MAX).then_some(nb);
            }
        }
        Triangulation {
            points: self.pts.clone(),
            triangles,
            neighbors,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point_process::{sample_binomial, DensitySpec};
    use crate::rng::Seed;

    fn assert_valid(tri: &Triangulation) {
        let p = tri.points();
        let n = p.len();
        for (t, v) in tri.triangles().iter().enumerate() {
            assert!(orient(p.point(v[0]), p.point(v[1]), p.point(v[2])) > 0.0, "triangle {t} not ccw");
            for k in 0..3 {
                if let Some(nb) = tri.neighbors()[t][k] {
                    assert!(tri.neighbors()[nb].contains(&Some(t)));
                }
            }
            for q in 0..n {
                if v.contains(&q) {
                    continue;
                }
                assert!(
                    in_circle(p.point(v[0]), p.point(v[1]), p.point(v[2]), p.point(q)) <= 0.0,
                    "point {q} inside circumcircle of {v:?}"
                );
            }
        }
        // Euler: t = 2n - 2 - h for a triangulated convex hull with h hull vertices
        let hull_edges = tri.neighbors().iter().flatten().filter(|n| n.is_none()).count();
        assert_eq!(tri.triangles().len(), 2 * n - 2 - hull_edges);
    }

    #[test]
    fn random_points_are_delaunay() {
        for s in 0..5 {
            let ps = sample_binomial(&DensitySpec::uniform_unit_cube(2), 300, Seed(s)).unwrap();
            assert_valid(&Triangulation::new(&ps).unwrap());
        }
    }

    #[test]
    fn lattice_points_are_handled() {
        let mut rows = Vec::new();
        for i in 0..12 {
            for j in 0..9 {
                rows.push([i as f64, j as f64]);
            }
        }
        let ps = PointSet::from_rows(2, rows).unwrap();
        let tri = Triangulation::new(&ps).unwrap();
        assert_valid(&tri);
        // every unit square's cocircular corners are all paired
        let pairs = tri.delaunay_graph_pairs();
        assert!(pairs.contains(&(0, 10)) && pairs.contains(&(1, 9)));
    }

    #[test]
    fn collinear_and_duplicate_inputs_fail() {
        let line = PointSet::from_rows(2, [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [5.0, 5.0]]).unwrap();
        assert!(matches!(Triangulation::new(&line), Err(Error::Degenerate(_))));
        let dup = PointSet::from_rows(2, [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(Triangulation::new(&dup), Err(Error::DuplicatePoints(0, 2))));
    }

    #[test]
    fn collinear_prefix_then_off_line_point() {
        let ps = PointSet::from_rows(
            2,
            [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0], [4.0, 0.0], [2.0, 1.0], [2.0, -3.0]],
        )
        .unwrap();
        let tri = Triangulation::new(&ps).unwrap();
        assert_valid(&tri);
    }

    #[test]
    fn circumcenter_of_right_triangle() {
        let c = circumcenter(&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0]);
        assert_eq!(c, [1.0, 1.0]);
    }
}
