//! Per-point functionals `ξ(x; X)`.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{pattern_indicators, vertex_weights, EdgeShare, PatternSpec, WeightFn};
use crate::boolean_model::build_scene;
use crate::error::{Error, Result};
use crate::graphs::{delaunay_voronoi_2d, Built, GeoGraph, GraphKind, UnionFind};
use crate::packing_online::{ball_radius, rsa_pack_radius};
use crate::point_process::{MarkKind, MarkedPointSet, RadiusDist};
use crate::spatial::{PointSet, SpatialIndex, Window};

/// A configuration on which functionals are evaluated: marked points and,
/// optionally, the region they were sampled from. Voronoi cells are clipped
/// to a box-shaped support.
#[derive(Debug, Clone)]
pub struct Scene {
    pub points: MarkedPointSet,
    pub support: Option<Window>,
}

impl Scene {
    pub fn new(points: impl Into<MarkedPointSet>) -> Self {
        Scene {
            points: points.into(),
            support: None,
        }
    }

    pub fn with_support(mut self, support: Window) -> Self {
        self.support = Some(support);
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.points.dim()
    }

    /// Points (and support) multiplied by `s`; marks are unchanged.
    pub fn scaled(&self, s: f64) -> Scene {
        Scene {
            points: self.points.scaled(s),
            support: self.support.as_ref().map(|w| w.scaled(s)),
        }
    }
}

impl From<PointSet> for Scene {
    fn from(p: PointSet) -> Self {
        Scene::new(p)
    }
}

impl From<MarkedPointSet> for Scene {
    fn from(p: MarkedPointSet) -> Self {
        Scene::new(p)
    }
}

/// A functional `ξ(x; X) ≥ 0` depending only on the relative positions (and
/// marks) of the configuration.
pub trait Xi: Send + Sync {
    /// `ξ(x; X)` for every point `x` of the scene.
    fn values(&self, scene: &Scene) -> Result<Vec<f64>>;

    /// `ξ(x_v; X)`.
    fn value_at(&self, scene: &Scene, v: usize) -> Result<f64> {
        Ok(self.values(scene)?[v])
    }

    /// `γ` such that `ξ(ax; aX) = a^γ ξ(x; X)`, when known.
    fn homogeneity(&self) -> Option<f64> {
        None
    }

    /// Marks the functional reads; samplers attach them.
    fn mark_kind(&self) -> Option<MarkKind> {
        None
    }

    /// The local structure at `v` that determines the value (for graph
    /// functionals, the neighbours of `v`), as raw coordinate bits. Used as
    /// an exact match rule when detecting stabilization.
    fn local_signature(&self, _scene: &Scene, _v: usize) -> Result<Option<Vec<u64>>> {
        Ok(None)
    }
}

/// A functional given by a closure `(scene, v) ↦ ξ(x_v; X)`.
pub struct PerPoint<F> {
    f: F,
    gamma: Option<f64>,
}

impl<F: Fn(&Scene, usize) -> f64 + Send + Sync> PerPoint<F> {
    pub fn new(f: F) -> Self {
        PerPoint { f, gamma: None }
    }

    pub fn homogeneous(f: F, gamma: f64) -> Self {
        PerPoint { f, gamma: Some(gamma) }
    }
}

impl<F: Fn(&Scene, usize) -> f64 + Send + Sync> Xi for PerPoint<F> {
    fn values(&self, scene: &Scene) -> Result<Vec<f64>> {
        Ok((0..scene.len()).map(|v| (self.f)(scene, v)).collect())
    }

    fn value_at(&self, scene: &Scene, v: usize) -> Result<f64> {
        Ok((self.f)(scene, v))
    }

    fn homogeneity(&self) -> Option<f64> {
        self.gamma
    }
}

/// Per-clump statistic shared equally among the clump's balls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum ClumpStatistic {
    /// `1/k` for a clump of order `k`; sums to the clump count.
    Reciprocal,
    /// Covered volume; sums to the volume of the union.
    Volume,
    /// `2π·χ`; sums to the total curvature (d = 2).
    Curvature,
    /// Size of a maximum disjoint subfamily; sums to the off-line packing number.
    Packing,
}

/// The built-in functionals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum XiSpec {
    Constant {
        value: f64,
    },
    /// `φ`-weighted edges at the point: half of each incident edge, or every
    /// in-edge in full (directed graphs).
    EdgeWeight {
        graph: GraphKind,
        phi: WeightFn,
        #[serde(default)]
        share: EdgeShare,
    },
    /// Reciprocal of the order of the point's component.
    ComponentReciprocal {
        graph: GraphKind,
    },
    /// Indicator that the pattern occurs at the point.
    Pattern {
        graph: GraphKind,
        pattern: PatternSpec,
    },
    /// Number of other points within distance `radius`.
    CountWithin {
        radius: f64,
    },
    /// Boolean model of balls with the given radius marks.
    Clump {
        statistic: ClumpStatistic,
        radius: RadiusDist,
    },
    /// Indicator that the point's ball (of unit volume) is packed on-line.
    RsaPacked,
}

impl XiSpec {
    pub fn name(&self) -> &'static str {
        match self {
            XiSpec::Constant { .. } => "constant",
            XiSpec::EdgeWeight { .. } => "edge_weight",
            XiSpec::ComponentReciprocal { .. } => "component_reciprocal",
            XiSpec::Pattern { .. } => "pattern",
            XiSpec::CountWithin { .. } => "count_within",
            XiSpec::Clump { .. } => "clump",
            XiSpec::RsaPacked => "rsa_packed",
        }
    }

    /// The graph family the functional is built on, if any.
    pub fn graph(&self) -> Option<&GraphKind> {
        match self {
            XiSpec::EdgeWeight { graph, .. } | XiSpec::ComponentReciprocal { graph } | XiSpec::Pattern { graph, .. } => {
                Some(graph)
            }
            _ => None,
        }
    }

    /// Checks parameters that do not depend on the data.
    pub fn validate(&self, dim: usize) -> Result<()> {
        if let Some(GraphKind::Voronoi { .. } | GraphKind::Delaunay) = self.graph() {
            if dim != 2 {
                return Err(Error::arg(format!("{} graphs need d = 2, got d = {dim}", self.graph().unwrap().name())));
            }
        }
        if let Some(GraphKind::Knn { k: 0, .. }) = self.graph() {
            return Err(Error::arg("k must be at least 1"));
        }
        match self {
            XiSpec::Constant { value } if !(value.is_finite() && *value >= 0.0) => {
                Err(Error::arg(format!("constant functional must be finite and ≥ 0, got {value}")))
            }
            XiSpec::EdgeWeight { graph, phi, share } => {
                phi.validate()?;
                if matches!(graph, GraphKind::Voronoi { .. }) && phi.value_at_infinity() != 0.0 {
                    return Err(Error::InvalidWeight(format!(
                        "Voronoi functionals need φ(∞) = 0, but φ(∞) = {}",
                        phi.value_at_infinity()
                    )));
                }
                if *share == EdgeShare::InEdges && !matches!(graph, GraphKind::Knn { directed: true, .. }) {
                    return Err(Error::arg("in-edge sharing needs a directed graph"));
                }
                Ok(())
            }
            XiSpec::ComponentReciprocal { graph: GraphKind::Voronoi { .. } } => {
                Err(Error::arg("use the Delaunay graph for components of a Voronoi tessellation"))
            }
            XiSpec::Pattern { graph, pattern } => {
                if matches!(graph, GraphKind::Voronoi { .. }) {
                    return Err(Error::arg("patterns need a graph, not a Voronoi diagram"));
                }
                pattern.validate()
            }
            XiSpec::CountWithin { radius } if !(radius.is_finite() && *radius >= 0.0) => {
                Err(Error::arg(format!("radius must be finite and ≥ 0, got {radius}")))
            }
            XiSpec::Clump { statistic, radius } => {
                radius.bound()?;
                match (statistic, dim) {
                    (ClumpStatistic::Curvature, d) if d != 2 => Err(Error::arg("curvature needs d = 2")),
                    (ClumpStatistic::Volume, d) if d > 2 => Err(Error::arg("exact volume needs d ≤ 2")),
                    _ => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    fn build_graph(&self, scene: &Scene) -> Result<Built> {
        let kind = self.graph().expect("graph functional");
        match kind {
            GraphKind::Voronoi { .. } => {
                let clip = scene.support.as_ref().filter(|w| matches!(w, Window::Box { .. }));
                Ok(Built::Voronoi(Box::new(delaunay_voronoi_2d(&scene.points.points, clip)?)))
            }
            k => k.build(&scene.points.points),
        }
    }

    fn clump_values(&self, scene: &Scene, statistic: ClumpStatistic, only: Option<usize>) -> Result<Vec<f64>> {
        let bs = build_scene(&scene.points, 1.0)?;
        let mut out = vec![0.0; bs.len()];
        let clumps: Vec<usize> = match only {
            Some(v) => vec![bs.clump_of(v)],
            None => (0..bs.clumps().len()).collect(),
        };
        for c in clumps {
            let members = &bs.clumps()[c];
            let total = match statistic {
                ClumpStatistic::Reciprocal => 1.0,
                ClumpStatistic::Volume => bs.clump_volume(c)?,
                ClumpStatistic::Curvature => std::f64::consts::TAU * bs.clump_euler(c)? as f64,
                ClumpStatistic::Packing => bs.clump_packing(c).0.len() as f64,
            };
            for &i in members {
                out[i] = total / members.len() as f64;
            }
        }
        Ok(out)
    }
}

fn component_reciprocals(g: &GeoGraph) -> Vec<f64> {
    let mut uf = UnionFind::new(g.vertex_count());
    for e in g.edges() {
        uf.union(e.a, e.b);
    }
    (0..g.vertex_count()).map(|v| 1.0 / uf.set_size(v) as f64).collect()
}

impl Xi for XiSpec {
    fn values(&self, scene: &Scene) -> Result<Vec<f64>> {
        self.validate(scene.dim())?;
        let n = scene.len();
        match self {
            XiSpec::Constant { value } => Ok(vec![*value; n]),
            XiSpec::EdgeWeight { phi, share, .. } => vertex_weights(&self.build_graph(scene)?, phi, 1.0, *share),
            XiSpec::ComponentReciprocal { .. } => {
                let built = self.build_graph(scene)?;
                Ok(component_reciprocals(built.as_graph().expect("not Voronoi")))
            }
            XiSpec::Pattern { pattern, .. } => {
                let built = self.build_graph(scene)?;
                let hits = pattern_indicators(built.as_graph().expect("not Voronoi"), pattern)?;
                Ok(hits.into_iter().map(|b| f64::from(u8::from(b))).collect())
            }
            XiSpec::CountWithin { radius } => {
                let index = SpatialIndex::build(&scene.points.points);
                Ok((0..n)
                    .map(|v| (index.range_query(scene.points.points.point(v), *radius).len() - 1) as f64)
                    .collect())
            }
            XiSpec::Clump { statistic, .. } => self.clump_values(scene, *statistic, None),
            XiSpec::RsaPacked => {
                let arrival = scene
                    .points
                    .arrival
                    .as_ref()
                    .ok_or_else(|| Error::arg("on-line packing needs arrival marks"))?;
                let r = ball_radius(1.0, scene.dim());
                let res = rsa_pack_radius(&scene.points.points, arrival, r);
                Ok(res.packed.into_iter().map(|b| f64::from(u8::from(b))).collect())
            }
        }
    }

    fn value_at(&self, scene: &Scene, v: usize) -> Result<f64> {
        if v >= scene.len() {
            return Err(Error::arg(format!("point {v} out of range for {} points", scene.len())));
        }
        match self {
            XiSpec::Constant { value } => Ok(*value),
            XiSpec::CountWithin { radius } => {
                let p = scene.points.points.point(v);
                Ok((scene.points.points.indices_within(p, *radius).len() - 1) as f64)
            }
            XiSpec::Clump { statistic, .. } => {
                self.validate(scene.dim())?;
                Ok(self.clump_values(scene, *statistic, Some(v))?[v])
            }
            _ => Ok(self.values(scene)?[v]),
        }
    }

    fn homogeneity(&self) -> Option<f64> {
        match self {
            XiSpec::Constant { .. } | XiSpec::ComponentReciprocal { .. } | XiSpec::Pattern { .. } => Some(0.0),
            XiSpec::EdgeWeight { phi, .. } => phi.homogeneity(),
            _ => None,
        }
    }

    fn mark_kind(&self) -> Option<MarkKind> {
        match self {
            XiSpec::Clump { radius, .. } => Some(MarkKind::Radius(radius.clone())),
            XiSpec::RsaPacked => Some(MarkKind::Arrival),
            _ => None,
        }
    }

    fn local_signature(&self, scene: &Scene, v: usize) -> Result<Option<Vec<u64>>> {
        if !matches!(self, XiSpec::EdgeWeight { .. }) {
            return Ok(None);
        }
        let built = self.build_graph(scene)?;
        let pts = &scene.points.points;
        let mut nbrs: Vec<usize> = match &built {
            Built::Graph(g) => {
                let share = match self {
                    XiSpec::EdgeWeight { share, .. } => *share,
                    _ => unreachable!(),
                };
                match share {
                    EdgeShare::Half => g.neighbors(v),
                    EdgeShare::InEdges => g
                        .incident_edges(v, crate::graphs::Incidence::In)?
                        .iter()
                        .map(|e| e.a)
                        .collect(),
                }
            }
            Built::Voronoi(d) => d.delaunay().neighbors(v),
        };
        nbrs.sort_by(|&a, &b| crate::spatial::lex_cmp(pts.point(a), pts.point(b)));
        Ok(Some(
            nbrs.iter()
                .flat_map(|&u| pts.point(u).iter().map(|x| x.to_bits()))
                .collect(),
        ))
    }
}
