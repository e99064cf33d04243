use rand::Rng;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::spatial::Window;

const MASS_TOLERANCE: f64 = 1e-6;

/// A bounded probability density on a box, sampled by rejection from its
/// bounding box with `sup_f` as the envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensitySpec {
    /// Uniform on a window (box or ball).
    Uniform { window: Window },
    /// Uniform on a simple polygon in the plane.
    UniformPolygon { vertices: Vec<[f64; 2]> },
    /// Piecewise constant on a regular grid over `[lo, hi]`. Cell values are
    /// stored with axis 0 varying fastest.
    Grid {
        lo: Vec<f64>,
        hi: Vec<f64>,
        shape: Vec<usize>,
        values: Vec<f64>,
    },
    /// Isotropic Gaussian restricted to a box and renormalized.
    TruncatedGaussian {
        mean: Vec<f64>,
        sigma: f64,
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
}

impl DensitySpec {
    pub fn uniform_unit_cube(d: usize) -> Self {
        DensitySpec::Uniform {
            window: Window::unit_cube(d),
        }
    }

    pub fn uniform_cube(d: usize, side: f64) -> Self {
        DensitySpec::Uniform {
            window: Window::cube(d, 0.0, side),
        }
    }

    /// The two-level density on `[0,1]^2` used across the docs and tests: mass
    /// `heavy` on the left half, `1 - heavy` on the right.
    pub fn two_level(heavy: f64) -> Self {
        DensitySpec::Grid {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, 1.0],
            shape: vec![2, 1],
            values: vec![2.0 * heavy, 2.0 * (1.0 - heavy)],
        }
    }

    /// Builds a 2D grid density from a CSV raster: row `j` holds the cells
    /// with y-index `j` (counted from `lo[1]`), column `i` the x-index.
    pub fn grid_from_csv<R: std::io::Read>(lo: [f64; 2], hi: [f64; 2], raster: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(raster);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| Error::InvalidDensity(format!("raster line {}: {e}", line + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(Error::InvalidDensity(format!("raster line {} is ragged", line + 1)));
                }
            }
            rows.push(row);
        }
        let ny = rows.len();
        let nx = rows.first().map_or(0, Vec::len);
        let values = rows.into_iter().flatten().collect();
        let spec = DensitySpec::Grid {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            shape: vec![nx, ny],
            values,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        match self {
            DensitySpec::Uniform { window } => window.dim(),
            DensitySpec::UniformPolygon { .. } => 2,
            DensitySpec::Grid { lo, .. } => lo.len(),
            DensitySpec::TruncatedGaussian { mean, .. } => mean.len(),
        }
    }

    /// Checks shape, sign and unit mass.
    pub fn validate(&self) -> Result<()> {
        match self {
            DensitySpec::Uniform { window } => window.validate().map_err(|e| Error::InvalidDensity(e.to_string())),
            DensitySpec::UniformPolygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::InvalidDensity("polygon needs at least 3 vertices".into()));
                }
                if vertices.iter().flatten().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidDensity("polygon has non-finite vertices".into()));
                }
                if polygon_area(vertices) <= 0.0 {
                    return Err(Error::InvalidDensity("polygon has zero area".into()));
                }
                Ok(())
            }
            DensitySpec::Grid { lo, hi, shape, values } => {
                Window::Box {
                    lo: lo.clone(),
                    hi: hi.clone(),
                }
                .validate()
                .map_err(|e| Error::InvalidDensity(e.to_string()))?;
                if shape.len() != lo.len() || shape.contains(&0) {
                    return Err(Error::InvalidDensity("grid shape must give a positive cell count per axis".into()));
                }
                if values.len() != shape.iter().product::<usize>() {
                    return Err(Error::InvalidDensity(format!(
                        "grid has {} values for {} cells",
                        values.len(),
                        shape.iter().product::<usize>()
                    )));
                }
                if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidDensity("grid values must be finite and nonnegative".into()));
                }
                let mass: f64 = values.iter().sum::<f64>() * self.grid_cell_volume();
                if (mass - 1.0).abs() > MASS_TOLERANCE {
                    return Err(Error::InvalidDensity(format!("grid integrates to {mass}, not 1")));
                }
                Ok(())
            }
            DensitySpec::TruncatedGaussian { mean, sigma, lo, hi } => {
                Window::Box {
                    lo: lo.clone(),
                    hi: hi.clone(),
                }
                .validate()
                .map_err(|e| Error::InvalidDensity(e.to_string()))?;
                if mean.len() != lo.len() || mean.iter().any(|m| !m.is_finite()) {
                    return Err(Error::InvalidDensity("gaussian mean must match box dimension".into()));
                }
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::InvalidDensity(format!("sigma must be positive, got {sigma}")));
                }
                Ok(())
            }
        }
    }

    fn grid_cell_volume(&self) -> f64 {
        match self {
            DensitySpec::Grid { lo, hi, shape, .. } => lo
                .iter()
                .zip(hi)
                .zip(shape)
                .map(|((a, b), s)| (b - a) / *s as f64)
                .product(),
            _ => unreachable!(),
        }
    }

    /// The box sampled from during rejection.
    pub fn bounding_box(&self) -> Window {
        match self {
            DensitySpec::Uniform { window } => {
                let (lo, hi) = window.bounds();
                Window::Box { lo, hi }
            }
            DensitySpec::UniformPolygon { vertices } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                Window::Box {
                    lo: lo.to_vec(),
                    hi: hi.to_vec(),
                }
            }
            DensitySpec::Grid { lo, hi, .. } | DensitySpec::TruncatedGaussian { lo, hi, .. } => Window::Box {
                lo: lo.clone(),
                hi: hi.clone(),
            },
        }
    }

    /// `f(x)`; zero outside the support.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            DensitySpec::Uniform { window } => {
                if window.contains(x) {
                    1.0 / window.volume()
                } else {
                    0.0
                }
            }
            DensitySpec::UniformPolygon { vertices } => {
                if point_in_polygon(vertices, [x[0], x[1]]) {
                    1.0 / polygon_area(vertices)
                } else {
                    0.0
                }
            }
            DensitySpec::Grid { lo, hi, shape, values } => {
                let mut flat = 0usize;
                let mut stride = 1usize;
                for k in 0..lo.len() {
                    if x[k] < lo[k] || x[k] > hi[k] {
                        return 0.0;
                    }
                    let t = (x[k] - lo[k]) / (hi[k] - lo[k]) * shape[k] as f64;
                    let cell = (t as usize).min(shape[k] - 1);
                    flat += cell * stride;
                    stride *= shape[k];
                }
                values[flat]
            }
            DensitySpec::TruncatedGaussian { mean, sigma, lo, hi } => {
                let std = Normal::standard();
                let mut v = 1.0;
                for k in 0..lo.len() {
                    if x[k] < lo[k] || x[k] > hi[k] {
                        return 0.0;
                    }
                    let z = (x[k] - mean[k]) / sigma;
                    let mass = std.cdf((hi[k] - mean[k]) / sigma) - std.cdf((lo[k] - mean[k]) / sigma);
                    v *= (-0.5 * z * z).exp() / ((2.0 * std::f64::consts::PI).sqrt() * sigma) / mass;
                }
                v
            }
        }
    }

    /// An upper bound for `f` over its bounding box (attained for every kind here).
    pub fn sup(&self) -> f64 {
        match self {
            DensitySpec::Uniform { window } => 1.0 / window.volume(),
            DensitySpec::UniformPolygon { vertices } => 1.0 / polygon_area(vertices),
            DensitySpec::Grid { values, .. } => values.iter().copied().fold(0.0, f64::max),
            DensitySpec::TruncatedGaussian { mean, lo, hi, .. } => {
                let mode: Vec<f64> = (0..lo.len()).map(|k| mean[k].clamp(lo[k], hi[k])).collect();
                self.eval(&mode)
            }
        }
    }

    /// `∫ f(x)^p dx`, in closed form where the density is piecewise constant.
    pub fn integral_of_power(&self, p: f64) -> Option<f64> {
        match self {
            DensitySpec::Uniform { window } => Some(window.volume().powf(1.0 - p)),
            DensitySpec::UniformPolygon { vertices } => Some(polygon_area(vertices).powf(1.0 - p)),
            DensitySpec::Grid { values, .. } => {
                let cell = self.grid_cell_volume();
                Some(values.iter().filter(|v| **v > 0.0).map(|v| v.powf(p) * cell).sum())
            }
            DensitySpec::TruncatedGaussian { .. } => None,
        }
    }

    /// One draw by rejection; returns the number of proposals used.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) -> u64 {
        let bbox = self.bounding_box();
        let sup = self.sup();
        let mut attempts = 0;
        loop {
            attempts += 1;
            bbox.sample_uniform(rng, out);
            let u: f64 = rng.random::<f64>() * sup;
            if u < self.eval(out) {
                return attempts;
            }
        }
    }
}

pub(crate) fn polygon_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        s += a[0] * b[1] - b[0] * a[1];
    }
    (0.5 * s).abs()
}

fn point_in_polygon(v: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = v.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (v[i], v[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0] {
            inside = !inside;
        }
        j = i;
    }
    inside
}
