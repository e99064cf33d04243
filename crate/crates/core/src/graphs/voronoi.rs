//! Voronoi diagrams in the plane, built as the dual of the Delaunay
//! triangulation.
//!
//! Unbounded cells have infinite area and their outer edges are rays (or a
//! full line for two sites) of infinite length. With a clip box every edge
//! is cut to the box, edges missing it are dropped, and cell areas are those
//! of `cell ∩ box`, so the areas of sites inside the box partition it.

use super::{GeoGraph, Triangulation};
use crate::error::{Error, Result};
use crate::spatial::{PointSet, Window};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VorGeometry {
    Segment { a: [f64; 2], b: [f64; 2] },
    Ray { origin: [f64; 2], dir: [f64; 2] },
    Line { point: [f64; 2], dir: [f64; 2] },
}

/// A Voronoi edge and the pair of sites whose cells it separates (the dual
/// Delaunay edge).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoronoiEdge {
    pub sites: (usize, usize),
    pub geometry: VorGeometry,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiCell {
    /// The unclipped cell is bounded.
    pub bounded: bool,
    /// Area of the cell, or of `cell ∩ clip` when clipped; `+inf` for an
    /// unclipped unbounded cell.
    pub area: f64,
    /// Counter-clockwise boundary; empty for unclipped unbounded cells.
    pub polygon: Vec<[f64; 2]>,
}

#[derive(Debug, Clone)]
pub struct VoronoiDiagram {
    sites: PointSet,
    cells: Vec<VoronoiCell>,
    edges: Vec<VoronoiEdge>,
    site_edges: Vec<Vec<usize>>,
    delaunay: GeoGraph,
    clip: Option<Window>,
}

impl VoronoiDiagram {
    pub fn sites(&self) -> &PointSet {
        &self.sites
    }

    pub fn cells(&self) -> &[VoronoiCell] {
        &self.cells
    }

    pub fn edges(&self) -> &[VoronoiEdge] {
        &self.edges
    }

    pub fn delaunay(&self) -> &GeoGraph {
        &self.delaunay
    }

    pub fn clip(&self) -> Option<&Window> {
        self.clip.as_ref()
    }

    /// CSV edge list `i,j,length` with the pair of sites each edge separates;
    /// infinite edges have length `inf`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "i,j,length")?;
        for e in &self.edges {
            writeln!(w, "{},{},{}", e.sites.0, e.sites.1, crate::spatial::format_num(e.length))?;
        }
        Ok(())
    }

    /// JSON document with sites, edge geometry and cell areas.
    pub fn to_json(&self) -> serde_json::Value {
        let finite = |x: f64| if x.is_finite() { serde_json::json!(x) } else { serde_json::Value::Null };
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|e| {
                let (kind, a, b) = match e.geometry {
                    VorGeometry::Segment { a, b } => ("segment", a, b),
                    VorGeometry::Ray { origin, dir } => ("ray", origin, dir),
                    VorGeometry::Line { point, dir } => ("line", point, dir),
                };
                serde_json::json!({"sites": [e.sites.0, e.sites.1], "kind": kind, "a": a, "b": b, "length": finite(e.length)})
            })
            .collect();
        serde_json::json!({
            "kind": "voronoi",
            "sites": self.sites.iter().collect::<Vec<_>>(),
            "clip": self.clip,
            "edges": edges,
            "cell_areas": self.cells.iter().map(|c| finite(c.area)).collect::<Vec<_>>(),
        })
    }

    /// The boundary edges of `v`'s cell.
    pub fn incident_edges(&self, v: usize) -> Result<Vec<VoronoiEdge>> {
        let ids = self
            .site_edges
            .get(v)
            .ok_or_else(|| Error::arg(format!("site {v} out of range for {} sites", self.sites.len())))?;
        Ok(ids.iter().map(|&i| self.edges[i]).collect())
    }
}

/// Delaunay triangulation and dual Voronoi diagram of a planar point set,
/// optionally clipped to a box.
pub fn delaunay_voronoi_2d(points: &PointSet, clip: Option<&Window>) -> Result<VoronoiDiagram> {
    if points.dim() != 2 {
        return Err(Error::arg("Voronoi diagrams are only available in the plane"));
    }
    let clip_box = match clip {
        None => None,
        Some(w @ Window::Box { lo, hi }) if lo.len() == 2 => {
            w.validate()?;
            Some(([lo[0], lo[1]], [hi[0], hi[1]]))
        }
        Some(_) => return Err(Error::arg("Voronoi clip window must be a planar box")),
    };
    super::check_duplicates(points)?;
    let n = points.len();
    let site = |i: usize| [points.point(i)[0], points.point(i)[1]];

    let mut edges = Vec::new();
    let mut bounded = vec![false; n];
    let mut vertex_lists: Vec<Vec<[f64; 2]>> = vec![Vec::new(); n];
    let delaunay_pairs: Vec<(usize, usize)>;

    match n {
        0 | 1 => delaunay_pairs = Vec::new(),
        2 => {
            let (p, q) = (site(0), site(1));
            let point = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
            let dir = normalize([-(q[1] - p[1]), q[0] - p[0]]);
            edges.push(VoronoiEdge {
                sites: (0, 1),
                geometry: VorGeometry::Line { point, dir },
                length: f64::INFINITY,
            });
            delaunay_pairs = vec![(0, 1)];
        }
        _ => {
            let tri = Triangulation::new(points)?;
            let centers: Vec<[f64; 2]> = (0..tri.triangles().len()).map(|t| tri.circumcenter(t)).collect();
            let mut on_hull = vec![false; n];
            for (t, vs) in tri.triangles().iter().enumerate() {
                for &v in vs {
                    vertex_lists[v].push(centers[t]);
                }
                for k in 0..3 {
                    let (u, v) = (vs[(k + 1) % 3], vs[(k + 2) % 3]);
                    let sites = (u.min(v), u.max(v));
                    match tri.neighbors()[t][k] {
                        Some(s) if t < s => {
                            let (a, b) = (centers[t], centers[s]);
                            edges.push(VoronoiEdge {
                                sites,
                                geometry: VorGeometry::Segment { a, b },
                                length: seg_len(a, b),
                            });
                        }
                        Some(_) => {}
                        None => {
                            on_hull[u] = true;
                            on_hull[v] = true;
                            let (pu, pv) = (site(u), site(v));
                            let dir = normalize([pv[1] - pu[1], -(pv[0] - pu[0])]);
                            edges.push(VoronoiEdge {
                                sites,
                                geometry: VorGeometry::Ray { origin: centers[t], dir },
                                length: f64::INFINITY,
                            });
                        }
                    }
                }
            }
            for v in 0..n {
                bounded[v] = !on_hull[v];
            }
            delaunay_pairs = tri.edges();
        }
    }
    let delaunay = GeoGraph::undirected(points.clone(), delaunay_pairs);

    if let Some((lo, hi)) = clip_box {
        edges = edges
            .into_iter()
            .filter_map(|e| clip_edge(&e, lo, hi))
            .collect();
    }

    let cells: Vec<VoronoiCell> = (0..n)
        .map(|v| match clip_box {
            Some((lo, hi)) => {
                let mut poly = vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]];
                let p = site(v);
                for u in delaunay.neighbors(v) {
                    poly = clip_halfplane(&poly, p, site(u));
                    if poly.is_empty() {
                        break;
                    }
                }
                VoronoiCell {
                    bounded: bounded[v],
                    area: polygon_area(&poly),
                    polygon: poly,
                }
            }
            None if bounded[v] => {
                let p = site(v);
                let mut poly = std::mem::take(&mut vertex_lists[v]);
                poly.sort_by(|a, b| {
                    let ta = (a[1] - p[1]).atan2(a[0] - p[0]);
                    let tb = (b[1] - p[1]).atan2(b[0] - p[0]);
                    ta.total_cmp(&tb)
                });
                VoronoiCell {
                    bounded: true,
                    area: polygon_area(&poly),
                    polygon: poly,
                }
            }
            None => VoronoiCell {
                bounded: false,
                area: f64::INFINITY,
                polygon: Vec::new(),
            },
        })
        .collect();

    let mut site_edges = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        site_edges[e.sites.0].push(i);
        site_edges[e.sites.1].push(i);
    }

    Ok(VoronoiDiagram {
        sites: points.clone(),
        cells,
        edges,
        site_edges,
        delaunay,
        clip: clip.cloned(),
    })
}

fn normalize(v: [f64; 2]) -> [f64; 2] {
    let l = (v[0] * v[0] + v[1] * v[1]).sqrt();
    [v[0] / l, v[1] / l]
}

fn seg_len(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub(crate) fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s.abs()
}

/// Keeps the part of convex `poly` closer to `p` than to `q`.
fn clip_halfplane(poly: &[[f64; 2]], p: [f64; 2], q: [f64; 2]) -> Vec<[f64; 2]> {
    // signed: negative inside
    let nx = q[0] - p[0];
    let ny = q[1] - p[1];
    let c = 0.5 * (q[0] * q[0] + q[1] * q[1] - p[0] * p[0] - p[1] * p[1]);
    let side = |x: [f64; 2]| nx * x[0] + ny * x[1] - c;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (sa, sb) = (side(a), side(b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Liang–Barsky clip of a segment, ray or line against a box.
fn clip_edge(e: &VoronoiEdge, lo: [f64; 2], hi: [f64; 2]) -> Option<VoronoiEdge> {
    let (origin, dir, mut t0, mut t1) = match e.geometry {
        VorGeometry::Segment { a, b } => {
            if a == b {
                let inside = (0..2).all(|k| lo[k] <= a[k] && a[k] <= hi[k]);
                return inside.then_some(*e);
            }
            (a, [b[0] - a[0], b[1] - a[1]], 0.0, 1.0)
        }
        VorGeometry::Ray { origin, dir } => (origin, dir, 0.0, f64::INFINITY),
        VorGeometry::Line { point, dir } => (point, dir, f64::NEG_INFINITY, f64::INFINITY),
    };
    for k in 0..2 {
        if dir[k] == 0.0 {
            if origin[k] < lo[k] || origin[k] > hi[k] {
                return None;
            }
            continue;
        }
        let ta = (lo[k] - origin[k]) / dir[k];
        let tb = (hi[k] - origin[k]) / dir[k];
        t0 = t0.max(ta.min(tb));
        t1 = t1.min(ta.max(tb));
    }
    if !(t0 < t1) {
        return None;
    }
    let a = [origin[0] + t0 * dir[0], origin[1] + t0 * dir[1]];
    let b = [origin[0] + t1 * dir[0], origin[1] + t1 * dir[1]];
    Some(VoronoiEdge {
        sites: e.sites,
        geometry: VorGeometry::Segment { a, b },
        length: seg_len(a, b),
    })
}
