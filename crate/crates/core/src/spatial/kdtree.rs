//! A kd-tree with median splits over an immutable point set.

use std::cmp::Ordering;

use super::{dist2, lex_cmp, PointSet};
use crate::error::{Error, Result};

const LEAF_SIZE: usize = 8;

/// One k-nearest result: index into the indexed point set and Euclidean distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { left: usize, right: usize },
}

/// Spatial index answering k-nearest and closed-ball range queries.
///
/// Results equal a linear scan: k-nearest lists are ordered by
/// `(squared distance, lexicographic coordinates)`, range results by index.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    points: PointSet,
    // tree order -> original index
    order: Vec<usize>,
    nodes: Vec<Node>,
    // per node: lo[0..d], hi[0..d]
    bboxes: Vec<f64>,
}

impl SpatialIndex {
    pub fn build(points: &PointSet) -> Self {
        let d = points.dim();
        let mut index = SpatialIndex {
            points: points.clone(),
            order: (0..points.len()).collect(),
            nodes: Vec::new(),
            bboxes: Vec::new(),
        };
        if !points.is_empty() {
            let mut order = std::mem::take(&mut index.order);
            index.build_node(&mut order, 0, points.len(), d);
            index.order = order;
        }
        index
    }

    fn build_node(&mut self, order: &mut [usize], start: usize, end: usize, d: usize) -> usize {
        let id = self.nodes.len();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for &i in &order[start..end] {
            for (k, c) in self.points.point(i).iter().enumerate() {
                lo[k] = lo[k].min(*c);
                hi[k] = hi[k].max(*c);
            }
        }
        self.bboxes.extend_from_slice(&lo);
        self.bboxes.extend_from_slice(&hi);
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        self.nodes.push(Node::Leaf { start, end });
        let axis = (0..d)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .unwrap_or(0);
        let mid = start + (end - start) / 2;
        let pts = &self.points;
        order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            pts.point(a)[axis].total_cmp(&pts.point(b)[axis])
        });
        let left = self.build_node(order, start, mid, d);
        let right = self.build_node(order, mid, end, d);
        self.nodes[id] = Node::Split { left, right };
        id
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn box_dist2(&self, node: usize, q: &[f64]) -> f64 {
        let d = q.len();
        let b = &self.bboxes[2 * d * node..2 * d * (node + 1)];
        let mut s = 0.0;
        for k in 0..d {
            let (lo, hi) = (b[k], b[d + k]);
            let x = q[k];
            let t = if x < lo {
                lo - x
            } else if x > hi {
                x - hi
            } else {
                0.0
            };
            s += t * t;
        }
        s
    }

    /// The `k` points nearest to `query`.
    pub fn k_nearest(&self, query: &[f64], k: usize) -> Result<Vec<Neighbor>> {
        self.k_nearest_impl(query, k, None)
    }

    /// The `k` nearest neighbours of indexed point `i`, excluding `i` itself
    /// (but not other points at the same location).
    pub fn k_nearest_of(&self, i: usize, k: usize) -> Result<Vec<Neighbor>> {
        if i >= self.len() {
            return Err(Error::arg(format!("index {i} out of range for {} points", self.len())));
        }
        self.k_nearest_impl(self.points.point(i), k, Some(i))
    }

    fn k_nearest_impl(&self, query: &[f64], k: usize, exclude: Option<usize>) -> Result<Vec<Neighbor>> {
        if k == 0 {
            return Err(Error::arg("k must be at least 1"));
        }
        if query.len() != self.points.dim() {
            return Err(Error::arg("query dimension does not match index"));
        }
        let available = self.len() - usize::from(exclude.is_some());
        if k > available {
            return Err(Error::InsufficientPoints { requested: k, available });
        }
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        self.knn_node(0, query, k, exclude, &mut best);
        Ok(best
            .into_iter()
            .map(|(d2, index)| Neighbor {
                index,
                distance: d2.sqrt(),
            })
            .collect())
    }

    fn cmp_candidate(&self, a: (f64, usize), b: (f64, usize)) -> Ordering {
        a.0.total_cmp(&b.0)
            .then_with(|| lex_cmp(self.points.point(a.1), self.points.point(b.1)))
            .then_with(|| a.1.cmp(&b.1))
    }

    fn knn_node(&self, node: usize, q: &[f64], k: usize, exclude: Option<usize>, best: &mut Vec<(f64, usize)>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    if Some(i) == exclude {
                        continue;
                    }
                    let cand = (dist2(self.points.point(i), q), i);
                    if best.len() == k {
                        if self.cmp_candidate(cand, best[k - 1]) != Ordering::Less {
                            continue;
                        }
                        best.pop();
                    }
                    let pos = best
                        .binary_search_by(|probe| self.cmp_candidate(*probe, cand))
                        .unwrap_or_else(|p| p);
                    best.insert(pos, cand);
                }
            }
            Node::Split { left, right } => {
                let (dl, dr) = (self.box_dist2(left, q), self.box_dist2(right, q));
                let (first, df, second, ds) = if dl <= dr {
                    (left, dl, right, dr)
                } else {
                    (right, dr, left, dl)
                };
                // A box at exactly the current worst distance may still hold a
                // lexicographically smaller tie, so only prune strictly.
                if best.len() < k || df <= best[k - 1].0 {
                    self.knn_node(first, q, k, exclude, best);
                }
                if best.len() < k || ds <= best[k - 1].0 {
                    self.knn_node(second, q, k, exclude, best);
                }
            }
        }
    }

    /// Indices of all points in the closed ball `B(center; radius)`, ascending.
    pub fn range_query(&self, center: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if self.is_empty() || radius < 0.0 {
            return out;
        }
        let r2 = radius * radius;
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            if self.box_dist2(node, center) > r2 {
                continue;
            }
            match self.nodes[node] {
                Node::Leaf { start, end } => {
                    out.extend(
                        self.order[start..end]
                            .iter()
                            .copied()
                            .filter(|&i| dist2(self.points.point(i), center) <= r2),
                    );
                }
                Node::Split { left, right } => {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
        out.sort_unstable();
        out
    }
}
