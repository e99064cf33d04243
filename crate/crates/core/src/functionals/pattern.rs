use std::collections::VecDeque;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::GeoGraph;

/// Largest explicit pattern graph accepted.
pub const MAX_PATTERN_VERTICES: usize = 6;

/// A connected pattern graph `Γ`. Degree patterns are shorthands: `Degree`
/// matches vertices of degree exactly `m`, `Star` (the star `K_{1,m}`)
/// vertices of degree at least `m`. Directed graphs are read as undirected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatternSpec {
    Degree { m: usize },
    Star { m: usize },
    Explicit { vertices: usize, edges: Vec<(usize, usize)> },
}

impl PatternSpec {
    pub fn triangle() -> Self {
        PatternSpec::Explicit {
            vertices: 3,
            edges: vec![(0, 1), (1, 2), (0, 2)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let PatternSpec::Explicit { vertices, edges } = self else {
            return Ok(());
        };
        let k = *vertices;
        if k == 0 || k > MAX_PATTERN_VERTICES {
            return Err(Error::arg(format!("pattern must have 1 to {MAX_PATTERN_VERTICES} vertices, got {k}")));
        }
        if let Some(e) = edges.iter().find(|(a, b)| a == b || *a >= k || *b >= k) {
            return Err(Error::arg(format!("invalid pattern edge {e:?}")));
        }
        let adj = pattern_adjacency(k, edges);
        if bfs_order(&adj, 0).len() != k {
            return Err(Error::arg("pattern graph must be connected"));
        }
        Ok(())
    }
}

fn pattern_adjacency(k: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); k];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

/// `(vertex, parent)` in breadth-first order from `root`.
fn bfs_order(adj: &[Vec<usize>], root: usize) -> Vec<(usize, usize)> {
    let mut seen = vec![false; adj.len()];
    let mut out = vec![(root, root)];
    seen[root] = true;
    let mut q = VecDeque::from([root]);
    while let Some(u) = q.pop_front() {
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                out.push((w, u));
                q.push_back(w);
            }
        }
    }
    out
}

/// Per-vertex indicator that `graph` contains a subgraph isomorphic to the
/// pattern with a vertex at that vertex.
pub fn pattern_indicators(graph: &GeoGraph, pattern: &PatternSpec) -> Result<Vec<bool>> {
    pattern.validate()?;
    let n = graph.vertex_count();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| graph.neighbors(v)).collect();
    Ok(match pattern {
        PatternSpec::Degree { m } => adj.iter().map(|a| a.len() == *m).collect(),
        PatternSpec::Star { m } => adj.iter().map(|a| a.len() >= *m).collect(),
        PatternSpec::Explicit { vertices, edges } => {
            let padj = pattern_adjacency(*vertices, edges);
            let orders: Vec<Vec<(usize, usize)>> = (0..*vertices).map(|r| bfs_order(&padj, r)).collect();
            (0..n).map(|v| orders.iter().any(|o| embeds(&adj, &padj, o, v))).collect()
        }
    })
}

/// Number of vertices at which the pattern occurs (each vertex counted once).
pub fn vertex_pattern_count(graph: &GeoGraph, pattern: &PatternSpec) -> Result<usize> {
    Ok(pattern_indicators(graph, pattern)?.into_iter().filter(|&b| b).count())
}

/// Whether the pattern embeds with the first vertex of `order` mapped to `v`.
fn embeds(adj: &[Vec<usize>], padj: &[Vec<usize>], order: &[(usize, usize)], v: usize) -> bool {
    let mut image = vec![usize::MAX; padj.len()];
    image[order[0].0] = v;
    extend(adj, padj, order, 1, &mut image)
}

fn extend(adj: &[Vec<usize>], padj: &[Vec<usize>], order: &[(usize, usize)], at: usize, image: &mut [usize]) -> bool {
    if at == order.len() {
        return true;
    }
    let (b, parent) = order[at];
    for &cand in &adj[image[parent]] {
        if image.contains(&cand) {
            continue;
        }
        let fits = padj[b]
            .iter()
            .all(|&c| image[c] == usize::MAX || adj[cand].binary_search(&image[c]).is_ok());
        if fits {
            image[b] = cand;
            if extend(adj, padj, order, at + 1, image) {
                image[b] = usize::MAX;
                return true;
            }
            image[b] = usize::MAX;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial::PointSet;

    fn graph(n: usize, pairs: &[(usize, usize)]) -> GeoGraph {
        let ps = PointSet::from_rows(1, (0..n).map(|i| [i as f64])).unwrap();
        GeoGraph::undirected(ps, pairs.iter().copied())
    }

    #[test]
    fn degree_patterns() {
        let path = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(vertex_pattern_count(&path, &PatternSpec::Degree { m: 1 }).unwrap(), 2);
        assert_eq!(vertex_pattern_count(&path, &PatternSpec::Star { m: 1 }).unwrap(), 3);
        assert_eq!(vertex_pattern_count(&path, &PatternSpec::Star { m: 2 }).unwrap(), 1);
    }

    #[test]
    fn explicit_patterns() {
        // triangle 0-1-2 with a pendant 3 hanging off 2
        let g = graph(5, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        let tri = pattern_indicators(&g, &PatternSpec::triangle()).unwrap();
        assert_eq!(tri, vec![true, true, true, false, false]);
        let p3 = PatternSpec::Explicit {
            vertices: 3,
            edges: vec![(0, 1), (1, 2)],
        };
        assert_eq!(pattern_indicators(&g, &p3).unwrap(), vec![true, true, true, true, false]);
        let single = PatternSpec::Explicit {
            vertices: 1,
            edges: vec![],
        };
        assert_eq!(vertex_pattern_count(&g, &single).unwrap(), 5);
    }

    #[test]
    fn rejects_bad_patterns() {
        let g = graph(2, &[(0, 1)]);
        let split = PatternSpec::Explicit {
            vertices: 3,
            edges: vec![(0, 1)],
        };
        assert!(vertex_pattern_count(&g, &split).is_err());
        let big = PatternSpec::Explicit {
            vertices: 7,
            edges: (0..6).map(|i| (i, i + 1)).collect(),
        };
        assert!(vertex_pattern_count(&g, &big).is_err());
    }
}
