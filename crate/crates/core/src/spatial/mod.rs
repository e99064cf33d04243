//! Points, windows and the spatial index every graph builder sits on.
//!
//! Balls are closed throughout: `B(x; r) = { y : |y - x| <= r }`. Where two
//! points are at the same distance from a query the lexicographically smaller
//! one wins; this is the single tie-break rule used by the whole crate.

mod kdtree;

use std::cmp::Ordering;
use std::io::{Read, Write};

use rand::Rng;
use rand_distr::StandardNormal;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use kdtree::{Neighbor, SpatialIndex};

/// A single point in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

impl From<&[f64]> for Point {
    fn from(c: &[f64]) -> Self {
        Point(c.to_vec())
    }
}

/// A finite point configuration with fixed dimension, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        PointSet {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, n: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        PointSet {
            dim,
            coords: Vec::with_capacity(dim * n),
        }
    }

    /// Builds a point set from a flat row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("dimension must be at least 1"));
        }
        if coords.len() % dim != 0 {
            return Err(Error::arg(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::arg(format!("non-finite coordinate in point {}", pos / dim)));
        }
        Ok(PointSet { dim, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(dim: usize, rows: impl IntoIterator<Item = R>) -> Result<Self> {
        let mut coords = Vec::new();
        for (i, row) in rows.into_iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::arg(format!("point {i} has {} coordinates, expected {dim}", row.len())));
            }
            coords.extend_from_slice(row);
        }
        PointSet::from_flat(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn push(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.dim, "dimension mismatch");
        self.coords.extend_from_slice(p);
    }

    /// Removes point `i` by moving the last point into its slot.
    pub fn swap_remove(&mut self, i: usize) {
        let n = self.len();
        assert!(i < n);
        let d = self.dim;
        if i != n - 1 {
            let (head, tail) = self.coords.split_at_mut((n - 1) * d);
            head[i * d..(i + 1) * d].copy_from_slice(tail);
        }
        self.coords.truncate((n - 1) * d);
    }

    pub fn scaled(&self, s: f64) -> PointSet {
        PointSet {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub fn translated(&self, v: &[f64]) -> PointSet {
        assert_eq!(v.len(), self.dim);
        let mut coords = self.coords.clone();
        for p in coords.chunks_exact_mut(self.dim) {
            for (c, t) in p.iter_mut().zip(v) {
                *c += t;
            }
        }
        PointSet { dim: self.dim, coords }
    }

    /// Subset by index list, in the given order.
    pub fn select(&self, idx: &[usize]) -> PointSet {
        let mut out = PointSet::with_capacity(self.dim, idx.len());
        for &i in idx {
            out.push(self.point(i));
        }
        out
    }

    /// Indices of points in the closed ball `B(center; r)`, in input order.
    pub fn indices_within(&self, center: &[f64], r: f64) -> Vec<usize> {
        let r2 = r * r;
        (0..self.len()).filter(|&i| dist2(self.point(i), center) <= r2).collect()
    }

    /// Reads one point per CSV row. A header row is detected when its first
    /// field does not parse as a number.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut dim = None;
        let mut coords = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            let row = match parsed {
                Ok(row) => row,
                Err(_) if line == 0 => continue,
                Err(e) => return Err(Error::arg(format!("line {}: {e}", line + 1))),
            };
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(Error::arg(format!(
                        "line {}: expected {d} columns, found {}",
                        line + 1,
                        row.len()
                    )))
                }
                _ => {}
            }
            coords.extend(row);
        }
        PointSet::from_flat(dim.unwrap_or(2), coords)
    }

    /// Writes one point per row; `header` adds `x0,...,x{d-1}`.
    pub fn write_csv<W: Write>(&self, mut w: W, header: bool) -> Result<()> {
        if header {
            let names: Vec<String> = (0..self.dim).map(|k| format!("x{k}")).collect();
            writeln!(w, "{}", names.join(","))?;
        }
        for p in self.iter() {
            let row: Vec<String> = p.iter().map(|c| format_num(*c)).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Shortest round-trip representation, `.` decimal.
pub fn format_num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

/// Lexicographic order on coordinates.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    use std::f64::consts::PI;
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// A bounded region standing in for `R^d`, or a Euclidean ball `B(x; r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Window {
    pub fn unit_cube(d: usize) -> Self {
        Window::Box {
            lo: vec![0.0; d],
            hi: vec![1.0; d],
        }
    }

    pub fn cube(d: usize, lo: f64, hi: f64) -> Self {
        Window::Box {
            lo: vec![lo; d],
            hi: vec![hi; d],
        }
    }

    pub fn centered_cube(d: usize, half_side: f64) -> Self {
        Window::cube(d, -half_side, half_side)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        Window::Ball { center, radius }
    }

    pub fn dim(&self) -> usize {
        match self {
            Window::Box { lo, .. } => lo.len(),
            Window::Ball { center, .. } => center.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Window::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(Error::arg("box bounds must be non-empty and of equal length"));
                }
                for (a, b) in lo.iter().zip(hi) {
                    if !(a.is_finite() && b.is_finite() && a < b) {
                        return Err(Error::arg(format!("degenerate box side [{a}, {b}]")));
                    }
                }
            }
            Window::Ball { center, radius } => {
                if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::arg("ball center must be finite and non-empty"));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::arg(format!("ball radius must be positive, got {radius}")));
                }
            }
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        match self {
            Window::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
            Window::Ball { center, radius } => unit_ball_volume(center.len()) * radius.powi(center.len() as i32),
        }
    }

    /// Closed membership.
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Window::Box { lo, hi } => p.iter().zip(lo.iter().zip(hi)).all(|(x, (a, b))| *a <= *x && *x <= *b),
            Window::Ball { center, radius } => dist2(p, center) <= radius * radius,
        }
    }

    /// Smallest axis-aligned box containing the window, as `(lo, hi)`.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Window::Box { lo, hi } => (lo.clone(), hi.clone()),
            Window::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
        }
    }

    pub fn scaled(&self, s: f64) -> Window {
        match self {
            Window::Box { lo, hi } => Window::Box {
                lo: lo.iter().map(|x| x * s).collect(),
                hi: hi.iter().map(|x| x * s).collect(),
            },
            Window::Ball { center, radius } => Window::Ball {
                center: center.iter().map(|x| x * s).collect(),
                radius: radius * s,
            },
        }
    }

    /// Draws one point uniformly from the window.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            Window::Box { lo, hi } => {
                for (k, o) in out.iter_mut().enumerate() {
                    *o = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
                }
            }
            Window::Ball { center, radius } => {
                let d = center.len();
                let mut norm2 = 0.0;
                while norm2 == 0.0 {
                    norm2 = 0.0;
                    for o in out.iter_mut() {
                        let g: f64 = rng.sample(StandardNormal);
                        *o = g;
                        norm2 += g * g;
                    }
                }
                let r = radius * rng.random::<f64>().powf(1.0 / d as f64) / norm2.sqrt();
                for (o, c) in out.iter_mut().zip(center) {
                    *o = c + *o * r;
                }
            }
        }
    }
}
