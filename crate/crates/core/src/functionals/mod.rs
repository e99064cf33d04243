//! Functionals of point configurations and their graphs: `H_ξ = Σ_x ξ(x; X)`,
//! `φ`-weighted edge lengths, component and pattern counts, and empirical
//! distributions of edge lengths and cell areas.

mod pattern;
mod weight;
mod xi;

use std::io::Write;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{Built, GeoGraph, Incidence, UnionFind, VoronoiDiagram};
use crate::spatial::format_num;

pub use pattern::{pattern_indicators, vertex_pattern_count, PatternSpec, MAX_PATTERN_VERTICES};
pub use weight::{WeightFn, WeightKind};
pub use xi::{ClumpStatistic, PerPoint, Scene, Xi, XiSpec};

/// How an edge's weight is split between its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum EdgeShare {
    /// Half to each endpoint.
    #[default]
    Half,
    /// All of it to the target of a directed edge.
    InEdges,
}

/// Anything with a list of (possibly infinite) edge lengths.
pub trait EdgeLengths {
    fn edge_lengths(&self) -> Vec<f64>;

    /// Voronoi edges can be infinite, and need `φ(∞) = 0`.
    fn is_voronoi(&self) -> bool {
        false
    }
}

impl EdgeLengths for GeoGraph {
    fn edge_lengths(&self) -> Vec<f64> {
        self.edges().iter().map(|e| e.length).collect()
    }
}

impl EdgeLengths for VoronoiDiagram {
    fn edge_lengths(&self) -> Vec<f64> {
        self.edges().iter().map(|e| e.length).collect()
    }

    fn is_voronoi(&self) -> bool {
        true
    }
}

impl EdgeLengths for Built {
    fn edge_lengths(&self) -> Vec<f64> {
        match self {
            Built::Graph(g) => g.edge_lengths(),
            Built::Voronoi(d) => d.edge_lengths(),
        }
    }

    fn is_voronoi(&self) -> bool {
        matches!(self, Built::Voronoi(_))
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if scale.is_finite() && scale > 0.0 {
        Ok(())
    } else {
        Err(Error::arg(format!("scale must be positive and finite, got {scale}")))
    }
}

fn check_phi<G: EdgeLengths + ?Sized>(graph: &G, phi: &WeightFn) -> Result<()> {
    phi.validate()?;
    if graph.is_voronoi() && phi.value_at_infinity() != 0.0 {
        return Err(Error::InvalidWeight(format!(
            "Voronoi functionals need φ(∞) = 0, but φ(∞) = {}",
            phi.value_at_infinity()
        )));
    }
    Ok(())
}

/// `L_φ = Σ_e φ(scale·|e|)`; infinite edges contribute `φ(∞)`.
pub fn weighted_length<G: EdgeLengths + ?Sized>(graph: &G, phi: &WeightFn, scale: f64) -> Result<f64> {
    check_scale(scale)?;
    check_phi(graph, phi)?;
    Ok(graph.edge_lengths().into_iter().map(|l| phi.eval(scale * l)).sum())
}

/// Per-vertex split of `L_φ`: each vertex gets half of each incident edge
/// (`EdgeShare::Half`), or each directed edge goes in full to its target.
pub fn vertex_weights(built: &Built, phi: &WeightFn, scale: f64, share: EdgeShare) -> Result<Vec<f64>> {
    check_scale(scale)?;
    check_phi(built, phi)?;
    let (n, edges): (usize, Vec<(usize, usize, f64)>) = match built {
        Built::Graph(g) => (g.vertex_count(), g.edges().iter().map(|e| (e.a, e.b, e.length)).collect()),
        Built::Voronoi(d) => (
            d.sites().len(),
            d.edges().iter().map(|e| (e.sites.0, e.sites.1, e.length)).collect(),
        ),
    };
    let mut out = vec![0.0; n];
    match share {
        EdgeShare::Half => {
            for (a, b, l) in edges {
                let w = 0.5 * phi.eval(scale * l);
                out[a] += w;
                out[b] += w;
            }
        }
        EdgeShare::InEdges => {
            let g = built
                .as_graph()
                .filter(|g| g.is_directed())
                .ok_or_else(|| Error::arg("in-edge sharing needs a directed graph"))?;
            for (v, slot) in out.iter_mut().enumerate() {
                *slot = g.incident_edges(v, Incidence::In)?.iter().map(|e| phi.eval(scale * e.length)).sum();
            }
        }
    }
    Ok(out)
}

fn components(graph: &GeoGraph) -> UnionFind {
    let mut uf = UnionFind::new(graph.vertex_count());
    for e in graph.edges() {
        uf.union(e.a, e.b);
    }
    uf
}

/// Number of connected components, ignoring edge directions.
pub fn component_count(graph: &GeoGraph) -> usize {
    components(graph).set_count()
}

/// Number of vertices in the component containing `vertex`.
pub fn component_order_of(graph: &GeoGraph, vertex: usize) -> Result<usize> {
    if vertex >= graph.vertex_count() {
        return Err(Error::arg(format!("vertex {vertex} out of range for {} vertices", graph.vertex_count())));
    }
    Ok(components(graph).set_size(vertex))
}

/// Component order of every vertex.
pub fn component_orders(graph: &GeoGraph) -> Vec<usize> {
    let mut uf = components(graph);
    (0..graph.vertex_count()).map(|v| uf.set_size(v)).collect()
}

/// Empirical distribution function sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ecdf {
    /// `(t, fraction ≤ t)`.
    pub points: Vec<(f64, f64)>,
    /// There was nothing to count; every value is 0 by convention.
    pub empty: bool,
}

impl Ecdf {
    fn from_values(mut values: Vec<f64>, grid: &[f64]) -> Result<Self> {
        if grid.iter().any(|t| t.is_nan()) || grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::arg("ECDF grid must be sorted ascending"));
        }
        values.sort_by(f64::total_cmp);
        let m = values.len();
        let points = grid
            .iter()
            .map(|&t| {
                let below = values.partition_point(|&v| v <= t);
                (t, if m == 0 { 0.0 } else { below as f64 / m as f64 })
            })
            .collect();
        Ok(Ecdf { points, empty: m == 0 })
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    /// Two-column CSV `t,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,value")?;
        for (t, v) in &self.points {
            writeln!(w, "{},{}", format_num(*t), format_num(*v))?;
        }
        Ok(())
    }
}

/// Fraction of edges with `scale·|e| ≤ t`, for each `t` of the grid.
pub fn edge_length_ecdf(graph: &GeoGraph, scale: f64, grid: &[f64]) -> Result<Ecdf> {
    check_scale(scale)?;
    Ecdf::from_values(graph.edges().iter().map(|e| scale * e.length).collect(), grid)
}

/// Fraction of cells with `scale·area ≤ t`. Unbounded cells never count.
pub fn cell_area_ecdf(diagram: &VoronoiDiagram, scale: f64, grid: &[f64]) -> Result<Ecdf> {
    check_scale(scale)?;
    Ecdf::from_values(diagram.cells().iter().map(|c| scale * c.area).collect(), grid)
}

/// `ξ(s x; s X)` for each point, checked to be finite and nonnegative.
pub fn xi_values(scene: &Scene, xi: &(impl Xi + ?Sized), scale: f64) -> Result<Vec<f64>> {
    check_scale(scale)?;
    let scaled;
    let s = if scale == 1.0 {
        scene
    } else {
        scaled = scene.scaled(scale);
        &scaled
    };
    let vals = xi.values(s)?;
    if let Some((index, &value)) = vals.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidXiValue { index, value });
    }
    Ok(vals)
}

/// `H_ξ = Σ_x ξ(s x; s X)` with `s = scale`.
pub fn h_xi(scene: &Scene, xi: &(impl Xi + ?Sized), scale: f64) -> Result<f64> {
    Ok(xi_values(scene, xi, scale)?.iter().sum())
}

/// `(1/n) Σ (ξ_i − mean)²` over the points of the scene.
pub fn sample_variance_xi(scene: &Scene, xi: &(impl Xi + ?Sized), scale: f64) -> Result<f64> {
    if scene.len() < 2 {
        return Err(Error::InsufficientPoints {
            requested: 2,
            available: scene.len(),
        });
    }
    // Welford
    let (mut mean, mut m2) = (0.0, 0.0);
    for (k, x) in xi_values(scene, xi, scale)?.into_iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    Ok(m2 / scene.len() as f64)
}
