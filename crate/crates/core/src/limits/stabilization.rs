use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{Scene, Xi};
use crate::point_process::{attach_marks, sample_poisson, MarkKind, MarkedPointSet};
use crate::rng::{Seed, StreamRng};
use crate::spatial::{PointSet, Window};

/// How the value at the origin is compared across windows and probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatchRule {
    /// Compare the local structure (edge set at the origin) when the
    /// functional exposes one, and the value in every case.
    Auto { tolerance: f64 },
    /// Values equal up to a relative tolerance.
    Value { tolerance: f64 },
}

impl Default for MatchRule {
    fn default() -> Self {
        MatchRule::Auto { tolerance: 1e-9 }
    }
}

impl MatchRule {
    fn tolerance(&self) -> f64 {
        match *self {
            MatchRule::Auto { tolerance } | MatchRule::Value { tolerance } => tolerance,
        }
    }
}

/// Empirical stabilization detector: nested windows `B(0; m_0) ⊂ B(0; m_1)
/// ⊂ …` plus randomized changes to the configuration outside the candidate
/// radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct StabilizationProbe {
    /// Window radii, strictly increasing.
    pub radii: Vec<f64>,
    /// Multiply the radii by `τ^{-1/d}`, so that windows hold the same
    /// expected number of points at every intensity.
    pub scale_with_intensity: bool,
    /// Perturbations tried at each candidate radius.
    pub probes: usize,
    pub match_rule: MatchRule,
}

impl Default for StabilizationProbe {
    fn default() -> Self {
        StabilizationProbe {
            radii: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            scale_with_intensity: true,
            probes: 8,
            match_rule: MatchRule::default(),
        }
    }
}

impl StabilizationProbe {
    pub fn with_radii(radii: Vec<f64>) -> Self {
        StabilizationProbe {
            radii,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radii.len() < 2 {
            return Err(Error::arg("stabilization schedule needs at least two radii"));
        }
        if !(self.radii[0] > 0.0) || self.radii.windows(2).any(|w| !(w[0] < w[1])) || !self.radii.iter().all(|r| r.is_finite()) {
            return Err(Error::arg("stabilization radii must be positive, finite and strictly increasing"));
        }
        if self.probes == 0 {
            return Err(Error::arg("at least one probe per level is required"));
        }
        if !(self.match_rule.tolerance() >= 0.0) {
            return Err(Error::arg("match tolerance must be ≥ 0"));
        }
        Ok(())
    }

    /// The schedule for intensity `tau` in dimension `d`.
    pub fn schedule(&self, tau: f64, d: usize) -> Vec<f64> {
        let s = if self.scale_with_intensity { tau.powf(-1.0 / d as f64) } else { 1.0 };
        self.radii.iter().map(|r| r * s).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiInfinitySample {
    /// `ξ(0; ·)` on the largest window (NaN if it could not be evaluated).
    pub value: f64,
    pub stabilized: bool,
    /// Smallest radius from which the value held through the rest of the
    /// schedule and survived every probe.
    pub r_hat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
struct Reading {
    value: f64,
    signature: Option<Vec<u64>>,
}

impl Reading {
    fn matches(&self, other: &Reading, tol: f64) -> bool {
        let close = self.value == other.value
            || (self.value - other.value).abs() <= tol * self.value.abs().max(other.value.abs()).max(1e-300);
        close && self.signature == other.signature
    }
}

fn read(xi: &(impl Xi + ?Sized), scene: &Scene, rule: MatchRule) -> Option<Reading> {
    let value = xi.value_at(scene, 0).ok()?;
    if !(value.is_finite() && value >= 0.0) {
        return None;
    }
    let signature = match rule {
        MatchRule::Auto { .. } => xi.local_signature(scene, 0).ok()?,
        MatchRule::Value { .. } => None,
    };
    Some(Reading { value, signature })
}

/// Samples `ξ(0; P_{τ,0})` through the stabilization detector.
pub fn xi_infinity_sample(
    xi: &(impl Xi + ?Sized),
    tau: f64,
    d: usize,
    probe: &StabilizationProbe,
    seed: Seed,
) -> Result<XiInfinitySample> {
    probe.validate()?;
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::arg(format!("intensity must be positive, got {tau}")));
    }
    let radii = probe.schedule(tau, d);
    let top = *radii.last().expect("validated");
    let pts = sample_poisson(tau, &Window::ball(vec![0.0; d], top), seed.child("xi_inf/points", 0), true)?;
    let marks = xi.mark_kind();
    let full = match &marks {
        Some(kind) => attach_marks(pts, kind, seed.child("xi_inf/marks", 0))?,
        None => MarkedPointSet::unmarked(pts),
    };
    let norms: Vec<f64> = full.points.iter().map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let within = |m: f64| -> Scene {
        let idx: Vec<usize> = (0..full.len()).filter(|&i| norms[i] <= m).collect();
        Scene::new(full.select(&idx))
    };

    let tol = probe.match_rule.tolerance();
    let readings: Vec<Option<Reading>> = radii.iter().map(|&m| read(xi, &within(m), probe.match_rule)).collect();
    let last = readings.len() - 1;
    let Some(top_reading) = readings[last].clone() else {
        return Ok(XiInfinitySample {
            value: f64::NAN,
            stabilized: false,
            r_hat: None,
        });
    };
    // first level of the agreement tail
    let mut first = last;
    while first > 0 && readings[first - 1].as_ref().is_some_and(|r| r.matches(&top_reading, tol)) {
        first -= 1;
    }
    let mut rng = seed.stream("xi_inf/probes", 0);
    for level in first..last {
        let r = radii[level];
        let survives = (0..probe.probes).all(|j| {
            let perturbed = perturb(&full, &norms, r, radii[level + 1], top, j % 2 == 1, marks.as_ref(), &mut rng);
            read(xi, &Scene::new(perturbed), probe.match_rule).is_some_and(|p| p.matches(&top_reading, tol))
        });
        if survives {
            return Ok(XiInfinitySample {
                value: top_reading.value,
                stabilized: true,
                r_hat: Some(r),
            });
        }
    }
    Ok(XiInfinitySample {
        value: top_reading.value,
        stabilized: false,
        r_hat: None,
    })
}

/// Inserts and deletes a few points in `r < |x| ≤ top`. Clustered probes put
/// their insertions in a tight group just outside `r` (between `r` and the
/// next schedule radius, biased towards `r`).
#[allow(clippy::too_many_arguments)]
fn perturb(
    full: &MarkedPointSet,
    norms: &[f64],
    r: f64,
    next: f64,
    top: f64,
    clustered: bool,
    marks: Option<&MarkKind>,
    rng: &mut StreamRng,
) -> MarkedPointSet {
    let d = full.points.dim();
    let q = rng.random_range(1..=4usize);
    // deletions
    let outside: Vec<usize> = (1..full.len()).filter(|&i| norms[i] > r).collect();
    let mut drop = vec![false; full.len()];
    for _ in 0..q.min(outside.len()) {
        drop[outside[rng.random_range(0..outside.len())]] = true;
    }
    let keep: Vec<usize> = (0..full.len()).filter(|&i| !drop[i]).collect();
    let mut out = full.select(&keep);
    // insertions
    let gaussian = |rng: &mut StreamRng| -> Vec<f64> { (0..d).map(|_| StandardNormal.sample(rng)).collect() };
    let unit = |v: Vec<f64>| -> Vec<f64> {
        let l = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / l).collect()
    };
    let centre = unit(gaussian(rng));
    for _ in 0..q {
        let (dir, radius) = if clustered {
            let jitter = gaussian(rng);
            let dir = unit(centre.iter().zip(&jitter).map(|(c, j)| c + 0.15 * j).collect());
            let u: f64 = rng.random();
            (dir, r + (next - r) * (1.0 - rng.random::<f64>()) * u)
        } else {
            // uniform in the annulus r < |x| ≤ top
            let u: f64 = rng.random();
            let (a, b) = (r.powi(d as i32), top.powi(d as i32));
            (unit(gaussian(rng)), (a + (b - a) * (1.0 - u)).powf(1.0 / d as f64))
        };
        let radius = radius.max(r * (1.0 + 1e-12)).min(top);
        let p: Vec<f64> = dir.iter().map(|x| x * radius).collect();
        let (arrival, rad) = match marks {
            Some(MarkKind::Arrival) => (Some(rng.random::<f64>()), None),
            Some(MarkKind::Radius(dist)) => (None, Some(dist.sample(rng))),
            None => (None, None),
        };
        out.push(&p, arrival, rad);
    }
    out
}

/// Convenience: the points of `P_{τ,0}` on `B(0; radius)`.
pub fn poisson_with_origin(tau: f64, d: usize, radius: f64, seed: Seed) -> Result<PointSet> {
    sample_poisson(tau, &Window::ball(vec![0.0; d], radius), seed, true)
}
