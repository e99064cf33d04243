use rand::Rng;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Seed;
use crate::spatial::PointSet;

/// Distribution of ball radii. Every variant must have bounded support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadiusDist {
    Constant { r: f64 },
    Uniform { lo: f64, hi: f64 },
    /// Exponential with the given mean, truncated at `cap`. Without a cap the
    /// radii are unbounded and the distribution is rejected.
    Exponential { mean: f64, cap: Option<f64> },
}

impl RadiusDist {
    /// The bound `K` on the support, or an error when there is none.
    pub fn bound(&self) -> Result<f64> {
        let k = match *self {
            RadiusDist::Constant { r } if r > 0.0 && r.is_finite() => r,
            RadiusDist::Uniform { lo, hi } if lo >= 0.0 && hi > lo && hi.is_finite() => hi,
            RadiusDist::Exponential { mean, cap: Some(cap) } if mean > 0.0 && cap > 0.0 && cap.is_finite() => cap,
            RadiusDist::Exponential { cap: None, .. } => {
                return Err(Error::arg("radius distribution is unbounded; give an explicit cap"))
            }
            _ => return Err(Error::arg(format!("invalid radius distribution {self:?}"))),
        };
        Ok(k)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            RadiusDist::Constant { r } => r,
            RadiusDist::Uniform { lo, hi } => {
                // (lo, hi]: radii must be positive
                hi - (hi - lo) * rng.random::<f64>()
            }
            RadiusDist::Exponential { mean, cap } => {
                let cap = cap.expect("validated");
                // inverse cdf of the exponential conditioned on [0, cap]
                let mass = 1.0 - (-cap / mean).exp();
                let u: f64 = 1.0 - rng.random::<f64>();
                (-mean * (1.0 - u * mass).ln()).clamp(f64::MIN_POSITIVE, cap)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarkKind {
    /// Uniform `[0,1]` arrival times.
    Arrival,
    /// Ball radii.
    Radius(RadiusDist),
}

/// Points with optional per-point arrival times and radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkedPointSet {
    pub points: PointSet,
    pub arrival: Option<Vec<f64>>,
    pub radius: Option<Vec<f64>>,
}

impl MarkedPointSet {
    pub fn unmarked(points: PointSet) -> Self {
        MarkedPointSet {
            points,
            arrival: None,
            radius: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Positions scaled by `s`; marks are unchanged.
    pub fn scaled(&self, s: f64) -> Self {
        MarkedPointSet {
            points: self.points.scaled(s),
            arrival: self.arrival.clone(),
            radius: self.radius.clone(),
        }
    }

    pub fn select(&self, idx: &[usize]) -> Self {
        let pick = |v: &Option<Vec<f64>>| v.as_ref().map(|v| idx.iter().map(|&i| v[i]).collect());
        MarkedPointSet {
            points: self.points.select(idx),
            arrival: pick(&self.arrival),
            radius: pick(&self.radius),
        }
    }

    pub fn push(&mut self, p: &[f64], arrival: Option<f64>, radius: Option<f64>) {
        self.points.push(p);
        if let (Some(v), Some(a)) = (self.arrival.as_mut(), arrival) {
            v.push(a);
        }
        if let (Some(v), Some(r)) = (self.radius.as_mut(), radius) {
            v.push(r);
        }
    }

    pub fn swap_remove(&mut self, i: usize) {
        self.points.swap_remove(i);
        if let Some(v) = self.arrival.as_mut() {
            v.swap_remove(i);
        }
        if let Some(v) = self.radius.as_mut() {
            v.swap_remove(i);
        }
    }
}

/// Attaches i.i.d. marks drawn from a stream independent of the positions.
/// Calling twice with different kinds stacks both marks.
pub fn attach_marks(points: impl Into<MarkedPointSet>, kind: &MarkKind, seed: Seed) -> Result<MarkedPointSet> {
    let mut marked = points.into();
    let n = marked.len();
    match kind {
        MarkKind::Arrival => {
            let mut rng = seed.stream("marks/arrival", 0);
            marked.arrival = Some((0..n).map(|_| rng.random::<f64>()).collect());
        }
        MarkKind::Radius(dist) => {
            dist.bound()?;
            let mut rng = seed.stream("marks/radius", 0);
            marked.radius = Some((0..n).map(|_| dist.sample(&mut rng)).collect());
        }
    }
    Ok(marked)
}

impl From<PointSet> for MarkedPointSet {
    fn from(points: PointSet) -> Self {
        MarkedPointSet::unmarked(points)
    }
}
