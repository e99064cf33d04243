use super::GeoGraph;
use crate::error::{Error, Result};
use crate::spatial::{PointSet, SpatialIndex};

/// k-nearest-neighbour graph. The directed variant has exactly `k`
/// out-edges per vertex; the undirected one joins `x` and `y` when either is
/// among the other's `k` nearest.
pub fn knn_graph(points: &PointSet, k: usize, directed: bool) -> Result<GeoGraph> {
    let n = points.len();
    if k == 0 {
        return Err(Error::arg("k must be at least 1"));
    }
    if n <= k {
        return Err(Error::InsufficientPoints {
            requested: k,
            available: n.saturating_sub(1),
        });
    }
    let index = SpatialIndex::build(points);
    let mut pairs = Vec::with_capacity(n * k);
    for i in 0..n {
        for nb in index.k_nearest_of(i, k)? {
            pairs.push((i, nb.index));
        }
    }
    Ok(if directed {
        GeoGraph::directed(points.clone(), pairs)
    } else {
        GeoGraph::undirected(points.clone(), pairs)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_is_mutual() {
        let ps = PointSet::from_rows(2, [[0.0, 0.0], [2.0, 1.0]]).unwrap();
        assert_eq!(knn_graph(&ps, 1, false).unwrap().edge_count(), 1);
        assert_eq!(knn_graph(&ps, 1, true).unwrap().edge_count(), 2);
        assert!(knn_graph(&ps, 2, false).is_err());
    }

    #[test]
    fn directed_out_degree() {
        let ps = PointSet::from_rows(1, (0..10).map(|i| [(i * i) as f64])).unwrap();
        let g = knn_graph(&ps, 3, true).unwrap();
        assert_eq!(g.edge_count(), 30);
    }
}
