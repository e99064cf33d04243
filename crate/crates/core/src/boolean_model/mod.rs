//! Boolean model of balls: clumps, covered volume, Euler characteristic and
//! off-line packing.
//!
//! A scene is a finite collection of closed balls. Two balls overlap when
//! their centers are at distance at most the sum of their radii (tangency
//! counts), and clumps are the connected components of the overlap graph.

mod area;
mod nerve;

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{GeoGraph, UnionFind};
use crate::point_process::MarkedPointSet;
use crate::rng::Seed;
use crate::spatial::{dist2, format_num, PointSet, SpatialIndex};

pub use area::{disk_union_area, interval_union_length};
pub use nerve::{euler_characteristic, MAX_SIMPLEX};

/// Largest clump solved exactly by [`offline_packing`].
pub const EXACT_PACKING_LIMIT: usize = 30;

#[derive(Debug, Clone)]
pub struct BooleanScene {
    centers: PointSet,
    radii: Vec<f64>,
    graph: GeoGraph,
    clump_of: Vec<usize>,
    clumps: Vec<Vec<usize>>,
}

/// Builds the scene of balls `X_i + n^{-1/d} S_i`: the radius marks are
/// shrunk by `n_scale^{-1/d}`. Use `n_scale = 1` for marks already in scene
/// units.
pub fn build_scene(marked: &MarkedPointSet, n_scale: f64) -> Result<BooleanScene> {
    let radii = marked
        .radius
        .as_ref()
        .ok_or_else(|| Error::arg("Boolean scene needs radius marks"))?;
    if !(n_scale.is_finite() && n_scale > 0.0) {
        return Err(Error::arg(format!("scale must be positive, got {n_scale}")));
    }
    let d = marked.points.dim();
    let shrink = n_scale.powf(-1.0 / d as f64);
    BooleanScene::new(marked.points.clone(), radii.iter().map(|r| r * shrink).collect())
}

impl BooleanScene {
    pub fn new(centers: PointSet, radii: Vec<f64>) -> Result<Self> {
        if radii.len() != centers.len() {
            return Err(Error::arg(format!("{} radii for {} centers", radii.len(), centers.len())));
        }
        if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::arg(format!("ball radius must be positive and finite, got {r}")));
        }
        let n = centers.len();
        let kmax = radii.iter().copied().fold(0.0, f64::max);
        let index = SpatialIndex::build(&centers);
        let mut pairs = Vec::new();
        for i in 0..n {
            let ci = centers.point(i);
            for j in index.range_query(ci, (radii[i] + kmax) * (1.0 + 1e-9)) {
                let s = radii[i] + radii[j];
                if j > i && dist2(ci, centers.point(j)) <= s * s {
                    pairs.push((i, j));
                }
            }
        }
        let mut uf = UnionFind::new(n);
        for &(i, j) in &pairs {
            uf.union(i, j);
        }
        let clump_of = uf.labels();
        let mut clumps = vec![Vec::new(); uf.set_count()];
        for (i, &c) in clump_of.iter().enumerate() {
            clumps[c].push(i);
        }
        Ok(BooleanScene {
            graph: GeoGraph::undirected(centers.clone(), pairs),
            centers,
            radii,
            clump_of,
            clumps,
        })
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.centers.dim()
    }

    pub fn centers(&self) -> &PointSet {
        &self.centers
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Overlap graph: edge iff `|c_i − c_j| ≤ r_i + r_j`.
    pub fn intersection_graph(&self) -> &GeoGraph {
        &self.graph
    }

    /// Clumps as ascending ball lists, numbered by their smallest member.
    pub fn clumps(&self) -> &[Vec<usize>] {
        &self.clumps
    }

    pub fn clump_of(&self, ball: usize) -> usize {
        self.clump_of[ball]
    }

    fn disks(&self, members: &[usize]) -> Vec<([f64; 2], f64)> {
        members
            .iter()
            .map(|&i| {
                let p = self.centers.point(i);
                ([p[0], p[1]], self.radii[i])
            })
            .collect()
    }

    /// Adjacency lists of the clump's overlap graph in local indices.
    fn local_adjacency(&self, members: &[usize]) -> Vec<Vec<usize>> {
        members
            .iter()
            .map(|&i| {
                self.graph
                    .neighbors(i)
                    .into_iter()
                    .map(|j| members.binary_search(&j).expect("neighbours share the clump"))
                    .collect()
            })
            .collect()
    }

    /// Exact volume of the union of one clump (d = 1 or 2).
    pub fn clump_volume(&self, clump: usize) -> Result<f64> {
        let members = &self.clumps[clump];
        match self.dim() {
            1 => Ok(interval_union_length(
                &members.iter().map(|&i| (self.centers.point(i)[0], self.radii[i])).collect::<Vec<_>>(),
            )),
            2 => Ok(disk_union_area(&self.disks(members))),
            d => Err(Error::arg(format!("exact volume is only available for d ≤ 2, got d = {d}"))),
        }
    }

    /// Euler characteristic of one clump's union (d = 2).
    pub fn clump_euler(&self, clump: usize) -> Result<i64> {
        if self.dim() != 2 {
            return Err(Error::arg("Euler characteristic is only available in the plane"));
        }
        let members = &self.clumps[clump];
        euler_characteristic(&self.disks(members), &self.local_adjacency(members))
    }

    /// Maximum number of pairwise disjoint balls in one clump, with the
    /// chosen balls and whether the answer is exact.
    pub fn clump_packing(&self, clump: usize) -> (Vec<usize>, bool) {
        let members = &self.clumps[clump];
        let adj = self.local_adjacency(members);
        let (local, exact) = if members.len() <= EXACT_PACKING_LIMIT {
            (max_independent_set(&adj), true)
        } else {
            (greedy_independent_set(&adj), false)
        };
        (local.into_iter().map(|k| members[k]).collect(), exact)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClumpCounts {
    /// Number of clumps `U`.
    pub total: usize,
    /// `U_k`: number of clumps made of exactly `k` balls.
    pub by_order: BTreeMap<usize, usize>,
}

pub fn clump_counts(scene: &BooleanScene) -> ClumpCounts {
    let mut by_order = BTreeMap::new();
    for c in scene.clumps() {
        *by_order.entry(c.len()).or_insert(0) += 1;
    }
    ClumpCounts {
        total: scene.clumps().len(),
        by_order,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VolumeMethod {
    /// Exact union volume, clump by clump (d ≤ 2).
    Exact,
    /// Hit counting over the clumps' bounding boxes.
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    /// Zero for the exact method.
    pub stderr: f64,
}

pub fn volume(scene: &BooleanScene, method: VolumeMethod) -> Result<VolumeEstimate> {
    match method {
        VolumeMethod::Exact => {
            let mut value = 0.0;
            for c in 0..scene.clumps().len() {
                value += scene.clump_volume(c)?;
            }
            Ok(VolumeEstimate { value, stderr: 0.0 })
        }
        VolumeMethod::MonteCarlo { samples, seed } => monte_carlo_volume(scene, samples, Seed(seed)),
    }
}

fn monte_carlo_volume(scene: &BooleanScene, samples: u64, seed: Seed) -> Result<VolumeEstimate> {
    if samples == 0 {
        return Err(Error::arg("Monte Carlo volume needs at least one sample"));
    }
    let d = scene.dim();
    let boxes: Vec<(Vec<f64>, Vec<f64>)> = scene
        .clumps()
        .iter()
        .map(|members| {
            let mut lo = vec![f64::INFINITY; d];
            let mut hi = vec![f64::NEG_INFINITY; d];
            for &i in members {
                let (p, r) = (scene.centers.point(i), scene.radii[i]);
                for k in 0..d {
                    lo[k] = lo[k].min(p[k] - r);
                    hi[k] = hi[k].max(p[k] + r);
                }
            }
            (lo, hi)
        })
        .collect();
    let vols: Vec<f64> = boxes.iter().map(|(lo, hi)| lo.iter().zip(hi).map(|(a, b)| b - a).product()).collect();
    let total_vol: f64 = vols.iter().sum();
    let mut rng = seed.stream("boolean/volume", 0);
    let (mut value, mut var) = (0.0, 0.0);
    let mut x = vec![0.0; d];
    for (c, members) in scene.clumps().iter().enumerate() {
        let m = ((samples as f64 * vols[c] / total_vol).round() as u64).max(1);
        let (lo, hi) = &boxes[c];
        let mut hits = 0u64;
        for _ in 0..m {
            for k in 0..d {
                x[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
            }
            if members.iter().any(|&i| {
                let r = scene.radii[i];
                dist2(&x, scene.centers.point(i)) <= r * r
            }) {
                hits += 1;
            }
        }
        let p = hits as f64 / m as f64;
        value += vols[c] * p;
        var += vols[c] * vols[c] * p * (1.0 - p) / m as f64;
    }
    Ok(VolumeEstimate { value, stderr: var.sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Curvature {
    pub chi: i64,
    /// Total curvature `2π·χ`.
    pub w: f64,
}

pub fn euler_curvature_2d(scene: &BooleanScene) -> Result<Curvature> {
    let mut chi = 0;
    for c in 0..scene.clumps().len() {
        chi += scene.clump_euler(c)?;
    }
    Ok(Curvature {
        chi,
        w: std::f64::consts::TAU * chi as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingResult {
    pub selected: Vec<bool>,
    /// Number of selected balls `M`.
    pub count: usize,
    /// Every clump was solved exactly.
    pub exact: bool,
}

/// Maximum set of pairwise disjoint balls, solved clump by clump.
pub fn offline_packing(scene: &BooleanScene) -> PackingResult {
    let mut selected = vec![false; scene.len()];
    let mut exact = true;
    for c in 0..scene.clumps().len() {
        let (chosen, ok) = scene.clump_packing(c);
        exact &= ok;
        for i in chosen {
            selected[i] = true;
        }
    }
    PackingResult {
        count: selected.iter().filter(|&&s| s).count(),
        selected,
        exact,
    }
}

/// Branch and bound over bitmasks; `adj.len()` must be at most 64.
fn max_independent_set(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let nbr: Vec<u64> = adj.iter().map(|a| a.iter().fold(0u64, |m, &j| m | 1 << j)).collect();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = 0u64;
    search(&nbr, all, 0, &mut best);
    (0..n).filter(|&i| best >> i & 1 == 1).collect()
}

fn search(nbr: &[u64], cand: u64, chosen: u64, best: &mut u64) {
    if chosen.count_ones() + cand.count_ones() <= best.count_ones() {
        return;
    }
    if cand == 0 {
        *best = chosen;
        return;
    }
    // branch on the candidate with most remaining neighbours; isolated ones
    // are always taken
    let mut v = cand.trailing_zeros() as usize;
    let mut deg = (nbr[v] & cand).count_ones();
    let mut rest = cand;
    while rest != 0 {
        let u = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let du = (nbr[u] & cand).count_ones();
        if du == 0 {
            return search(nbr, cand & !(1 << u), chosen | 1 << u, best);
        }
        if du > deg {
            v = u;
            deg = du;
        }
    }
    search(nbr, cand & !(1 << v) & !nbr[v], chosen | 1 << v, best);
    search(nbr, cand & !(1 << v), chosen, best);
}

/// Minimum-degree greedy independent set.
fn greedy_independent_set(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut alive = vec![true; n];
    let mut out = Vec::new();
    loop {
        let pick = (0..n)
            .filter(|&i| alive[i])
            .min_by_key(|&i| (adj[i].iter().filter(|&&j| alive[j]).count(), i));
        let Some(v) = pick else { break };
        out.push(v);
        alive[v] = false;
        for &j in &adj[v] {
            alive[j] = false;
        }
    }
    out.sort_unstable();
    out
}

/// Scene as CSV: `cx,cy[,cz...],radius,clump_id,selected`.
pub fn write_scene_csv<W: Write>(scene: &BooleanScene, packing: Option<&PackingResult>, mut w: W) -> Result<()> {
    let axes = ["cx", "cy", "cz"];
    let head: Vec<String> = (0..scene.dim())
        .map(|k| axes.get(k).map_or_else(|| format!("c{k}"), |s| s.to_string()))
        .collect();
    writeln!(w, "{},radius,clump_id,selected", head.join(","))?;
    for i in 0..scene.len() {
        let coords: Vec<String> = scene.centers.point(i).iter().map(|&x| format_num(x)).collect();
        let sel = packing.is_some_and(|p| p.selected[i]);
        writeln!(
            w,
            "{},{},{},{}",
            coords.join(","),
            format_num(scene.radii[i]),
            scene.clump_of[i],
            u8::from(sel)
        )?;
    }
    Ok(())
}
