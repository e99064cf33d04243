//! Geometric graphs on point sets: minimal spanning tree, k-nearest
//! neighbours, Delaunay/Voronoi (plane only), sphere of influence, Gabriel and
//! relative neighbourhood graphs.
//!
//! Every builder is a pure function of the point set. Edge lengths are the
//! Euclidean distances between endpoints, computed once at construction.

mod delaunay;
mod knn;
mod mst;
mod proximity;
mod union_find;
mod voronoi;

use std::collections::BTreeSet;
use std::io::Write;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spatial::{dist, format_num, PointSet, Window};

pub use delaunay::Triangulation;
pub use knn::knn_graph;
pub use mst::{mst, mst_prim};
pub use proximity::{gabriel, rng_graph, sig};
pub use union_find::UnionFind;
pub use voronoi::{delaunay_voronoi_2d, VorGeometry, VoronoiCell, VoronoiDiagram, VoronoiEdge};

pub(crate) use delaunay::check_duplicates;

/// A graph family, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    Mst,
    Knn {
        k: usize,
        #[serde(default)]
        directed: bool,
    },
    Delaunay,
    Voronoi {
        #[serde(default)]
        clip: Option<Window>,
    },
    Sig,
    Gabriel,
    Rng,
}

impl GraphKind {
    pub fn name(&self) -> &'static str {
        match self {
            GraphKind::Mst => "mst",
            GraphKind::Knn { .. } => "knn",
            GraphKind::Delaunay => "delaunay",
            GraphKind::Voronoi { .. } => "voronoi",
            GraphKind::Sig => "sig",
            GraphKind::Gabriel => "gabriel",
            GraphKind::Rng => "rng",
        }
    }

    /// Builds the graph. Voronoi input yields [`Built::Voronoi`]; every other
    /// family yields a [`GeoGraph`].
    pub fn build(&self, points: &PointSet) -> Result<Built> {
        Ok(match self {
            GraphKind::Mst => Built::Graph(mst(points)),
            GraphKind::Knn { k, directed } => Built::Graph(knn_graph(points, *k, *directed)?),
            GraphKind::Delaunay => Built::Graph(delaunay_graph(points)?),
            GraphKind::Voronoi { clip } => Built::Voronoi(Box::new(delaunay_voronoi_2d(points, clip.as_ref())?)),
            GraphKind::Sig => Built::Graph(sig(points)?),
            GraphKind::Gabriel => Built::Graph(gabriel(points)?),
            GraphKind::Rng => Built::Graph(rng_graph(points)?),
        })
    }
}

#[derive(Debug, Clone)]
pub enum Built {
    Graph(GeoGraph),
    Voronoi(Box<VoronoiDiagram>),
}

impl Built {
    pub fn as_graph(&self) -> Option<&GeoGraph> {
        match self {
            Built::Graph(g) => Some(g),
            Built::Voronoi(_) => None,
        }
    }

    /// Edges incident to vertex `v`: for a Voronoi diagram, the boundary
    /// edges of `v`'s cell, reported with their (possibly infinite) lengths.
    pub fn incident_lengths(&self, v: usize, mode: Incidence) -> Result<Vec<f64>> {
        match self {
            Built::Graph(g) => Ok(g.incident_edges(v, mode)?.iter().map(|e| e.length).collect()),
            Built::Voronoi(d) => Ok(d.incident_edges(v)?.iter().map(|e| e.length).collect()),
        }
    }
}

/// The Delaunay graph as a [`GeoGraph`]. Fewer than three points, or
/// collinear points, give the path through the points in sorted order; this
/// is the limit of the Delaunay graph of a slightly perturbed set.
pub fn delaunay_graph(points: &PointSet) -> Result<GeoGraph> {
    if points.dim() != 2 {
        return Err(Error::arg("Delaunay graph is only available in the plane"));
    }
    check_duplicates(points)?;
    let pairs = match Triangulation::new(points) {
        Ok(t) => t.edges(),
        Err(Error::Degenerate(_)) => mst::sorted_path(points),
        Err(e) => return Err(e),
    };
    Ok(GeoGraph::undirected(points.clone(), pairs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

/// Which edges count as incident to a vertex of a directed graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Incidence {
    #[default]
    All,
    Out,
    In,
}

/// A graph embedded on a point set. Undirected edges are stored with `a < b`;
/// directed edges as `(source, target)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoGraph {
    points: PointSet,
    edges: Vec<Edge>,
    directed: bool,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl GeoGraph {
    /// Undirected graph from index pairs; duplicates and orientation are
    /// normalized away. Panics on self-loops or out-of-range indices.
    pub fn undirected(points: PointSet, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let set: BTreeSet<(usize, usize)> = pairs
            .into_iter()
            .map(|(a, b)| {
                assert_ne!(a, b, "self-loop at {a}");
                (a.min(b), a.max(b))
            })
            .collect();
        Self::from_sorted(points, set.into_iter().collect(), false)
    }

    /// Directed graph from `(source, target)` pairs; duplicates removed.
    pub fn directed(points: PointSet, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let set: BTreeSet<(usize, usize)> = pairs
            .into_iter()
            .inspect(|(a, b)| assert_ne!(a, b, "self-loop at {a}"))
            .collect();
        Self::from_sorted(points, set.into_iter().collect(), true)
    }

    fn from_sorted(points: PointSet, pairs: Vec<(usize, usize)>, directed: bool) -> Self {
        let n = points.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); if directed { n } else { 0 }];
        let edges: Vec<Edge> = pairs
            .iter()
            .enumerate()
            .map(|(id, &(a, b))| {
                out_adj[a].push(id);
                if directed {
                    in_adj[b].push(id);
                } else {
                    out_adj[b].push(id);
                }
                Edge {
                    a,
                    b,
                    length: dist(points.point(a), points.point(b)),
                }
            })
            .collect();
        GeoGraph {
            points,
            edges,
            directed,
            out_adj,
            in_adj,
        }
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// `(a, b)` pairs as stored.
    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges.iter().map(|e| (e.a, e.b)).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// The edges `E(v; G)` incident to `v`. For undirected graphs `mode` is
    /// ignored.
    pub fn incident_edges(&self, v: usize, mode: Incidence) -> Result<Vec<Edge>> {
        if v >= self.vertex_count() {
            return Err(Error::arg(format!("vertex {v} out of range for {} vertices", self.vertex_count())));
        }
        let ids: Vec<usize> = if !self.directed {
            self.out_adj[v].clone()
        } else {
            match mode {
                Incidence::Out => self.out_adj[v].clone(),
                Incidence::In => self.in_adj[v].clone(),
                Incidence::All => {
                    let mut all: Vec<usize> = self.out_adj[v].iter().chain(&self.in_adj[v]).copied().collect();
                    all.sort_unstable();
                    all
                }
            }
        };
        Ok(ids.into_iter().map(|i| self.edges[i]).collect())
    }

    /// Undirected degree (in- plus out-degree for directed graphs).
    pub fn degree(&self, v: usize) -> usize {
        self.out_adj[v].len() + self.in_adj.get(v).map_or(0, Vec::len)
    }

    /// Neighbours ignoring direction, ascending, without repeats.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.out_adj[v]
            .iter()
            .chain(self.in_adj.get(v).into_iter().flatten())
            .map(|&id| {
                let e = &self.edges[id];
                if e.a == v { e.b } else { e.a }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// CSV edge list `i,j,length`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "i,j,length")?;
        for e in &self.edges {
            writeln!(w, "{},{},{}", e.a, e.b, format_num(e.length))?;
        }
        Ok(())
    }

    /// JSON document with vertices, edges and the supplied metadata.
    pub fn to_json(&self, kind: &GraphKind) -> serde_json::Value {
        serde_json::json!({
            "kind": kind,
            "directed": self.directed,
            "dim": self.points.dim(),
            "vertices": self.points.iter().collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| serde_json::json!([e.a, e.b, e.length])).collect::<Vec<_>>(),
        })
    }
}
