use std::cmp::Ordering;

use super::{GeoGraph, Triangulation, UnionFind};
use crate::error::Error;
use crate::spatial::{dist, lex_cmp, PointSet};

/// Total order on candidate edges: length, then smaller index, then larger.
/// With it the minimal spanning tree is unique.
pub(crate) fn edge_order(a: (f64, usize, usize), b: (f64, usize, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
}

/// Euclidean minimal spanning tree (a forest is impossible: the complete
/// graph is connected).
///
/// In the plane the tree is found by Kruskal over the Delaunay graph, which
/// contains it. In one dimension the tree is the sorted path. Elsewhere, or
/// for degenerate planar input, Prim runs over the complete graph.
pub fn mst(points: &PointSet) -> GeoGraph {
    let n = points.len();
    if n < 2 {
        return GeoGraph::undirected(points.clone(), []);
    }
    match points.dim() {
        1 if super::check_duplicates(points).is_ok() => GeoGraph::undirected(points.clone(), sorted_path(points)),
        2 => match Triangulation::new(points) {
            Ok(tri) => kruskal(points, tri.delaunay_graph_pairs()),
            Err(Error::Degenerate(_)) | Err(Error::DuplicatePoints(..)) => mst_prim(points),
            Err(e) => unreachable!("triangulation failed unexpectedly: {e}"),
        },
        _ => mst_prim(points),
    }
}

fn kruskal(points: &PointSet, pairs: Vec<(usize, usize)>) -> GeoGraph {
    let n = points.len();
    let mut cands: Vec<(f64, usize, usize)> = pairs
        .into_iter()
        .map(|(i, j)| (dist(points.point(i), points.point(j)), i.min(j), i.max(j)))
        .collect();
    cands.sort_by(|a, b| edge_order(*a, *b));
    let mut uf = UnionFind::new(n);
    let mut tree = Vec::with_capacity(n - 1);
    for (_, i, j) in cands {
        if uf.union(i, j) {
            tree.push((i, j));
            if tree.len() == n - 1 {
                break;
            }
        }
    }
    GeoGraph::undirected(points.clone(), tree)
}

/// Prim's algorithm on the complete graph, `O(n^2)` time, `O(n)` memory.
pub fn mst_prim(points: &PointSet) -> GeoGraph {
    let n = points.len();
    if n < 2 {
        return GeoGraph::undirected(points.clone(), []);
    }
    let mut in_tree = vec![false; n];
    let mut best: Vec<(f64, usize, usize)> = vec![(f64::INFINITY, usize::MAX, usize::MAX); n];
    let mut tree = Vec::with_capacity(n - 1);
    let mut current = 0;
    in_tree[0] = true;
    for _ in 1..n {
        let pc = points.point(current);
        let mut next = usize::MAX;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let key = (dist(pc, points.point(v)), current.min(v), current.max(v));
            if edge_order(key, best[v]) == Ordering::Less {
                best[v] = key;
            }
            if next == usize::MAX || edge_order(best[v], best[next]) == Ordering::Less {
                next = v;
            }
        }
        in_tree[next] = true;
        tree.push((best[next].1, best[next].2));
        current = next;
    }
    GeoGraph::undirected(points.clone(), tree)
}

/// Consecutive pairs in lexicographic order.
pub(crate) fn sorted_path(points: &PointSet) -> Vec<(usize, usize)> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| lex_cmp(points.point(a), points.point(b)).then(a.cmp(&b)));
    idx.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_on_a_line() {
        let ps = PointSet::from_rows(2, [[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]).unwrap();
        let t = mst(&ps);
        assert_eq!(t.edge_set().into_iter().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(t.total_length(), 3.0);
    }

    #[test]
    fn unit_square() {
        let ps = PointSet::from_rows(2, [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let t = mst(&ps);
        assert_eq!(t.edge_count(), 3);
        assert_eq!(t.total_length(), 3.0);
        // ties resolved by index: (0,1), (0,3), (1,2)
        assert_eq!(t.edge_set().into_iter().collect::<Vec<_>>(), vec![(0, 1), (0, 3), (1, 2)]);
        assert_eq!(t.edge_set(), mst_prim(&ps).edge_set());
    }

    #[test]
    fn one_dimension_and_duplicates() {
        let ps = PointSet::from_rows(1, [[3.0], [0.0], [1.0]]).unwrap();
        assert_eq!(mst(&ps).total_length(), 3.0);
        let dup = PointSet::from_rows(2, [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 2.0]]).unwrap();
        let t = mst(&dup);
        assert_eq!(t.edge_set().into_iter().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (0, 3)]);
    }

    #[test]
    fn tiny_inputs() {
        assert_eq!(mst(&PointSet::new(2)).edge_count(), 0);
        assert_eq!(mst(&PointSet::from_rows(3, [[1.0, 2.0, 3.0]]).unwrap()).edge_count(), 0);
    }
}
