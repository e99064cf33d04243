//! Experiment configuration and finite-`n` convergence tables.

use std::io::Write;

use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{rhs_integral, RhsMethod, StabilizationProbe};
use crate::boolean_model::VolumeMethod;
use crate::error::{Error, Result};
use crate::functionals::{h_xi, PatternSpec, Scene, Xi, XiSpec};
use crate::graphs::GraphKind;
use crate::point_process::{attach_marks, sample_binomial, DensitySpec, MarkKind, MarkedPointSet, RadiusDist};
use crate::rng::Seed;
use crate::spatial::{format_num, Window};

/// Where the reference limit of a convergence experiment comes from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LimitSource {
    /// A known value.
    Fixed { value: f64 },
    /// Estimated with [`rhs_integral`].
    Rhs {
        outer_samples: usize,
        inner_replicates: usize,
        #[serde(default)]
        method: RhsMethod,
    },
    /// Report raw means only.
    #[default]
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub dir: Option<String>,
    pub format: Option<Format>,
}

/// The pipelines a configuration can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Sample,
    Graph,
    Functional,
    Limit,
    Converge,
    Couple,
    Boolean,
    Pack,
}

/// A JSON experiment description. Sections not used by a task are ignored
/// by it, but every section present is checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensitySpec>,
    /// Sample size for single-sample tasks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<XiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marks: Option<MarkKind>,
    /// Ball radii for the Boolean model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<RadiusDist>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<VolumeMethod>,
    #[serde(default)]
    pub probe: StabilizationProbe,
    /// Poisson intensity for `limit`.
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default)]
    pub limit: LimitSource,
    /// Coupling window radius `K`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ecdf_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub outputs: Outputs,
}

fn default_replicates() -> usize {
    10
}

fn default_tau() -> f64 {
    1.0
}

impl ExperimentConfig {
    /// Parses JSON; syntax errors carry their line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::config(format!("line {}, column {}", e.line(), e.column()), e.to_string())
        })
    }

    /// Parses and validates; semantic errors are anchored at the line of the
    /// offending key in `text`.
    pub fn load(text: &str) -> Result<Self> {
        let config = Self::from_json(text)?;
        config.validate().map_err(|e| anchor(text, e))?;
        Ok(config)
    }

    /// The published JSON schema of experiment files.
    pub fn json_schema() -> serde_json::Value {
        serde_json::to_value(schemars::schema_for!(ExperimentConfig)).expect("schema serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn dim(&self) -> Option<usize> {
        self.density.as_ref().map(DensitySpec::dim)
    }

    fn need<'a, T>(&self, field: &'a Option<T>, name: &str, task: Task) -> Result<&'a T> {
        field
            .as_ref()
            .ok_or_else(|| Error::config(name, format!("required by task '{}'", task_name(task))))
    }

    pub fn density_for(&self, task: Task) -> Result<&DensitySpec> {
        self.need(&self.density, "density", task)
    }

    pub fn functional_for(&self, task: Task) -> Result<&XiSpec> {
        self.need(&self.functional, "functional", task)
    }

    pub fn graph_for(&self, task: Task) -> Result<&GraphKind> {
        self.need(&self.graph, "graph", task)
    }

    pub fn radius_for(&self, task: Task) -> Result<&RadiusDist> {
        self.need(&self.radius, "radius", task)
    }

    pub fn n_for(&self, task: Task) -> Result<usize> {
        self.need(&self.n, "n", task).copied()
    }

    /// Checks every section that is present.
    pub fn validate(&self) -> Result<()> {
        if let Some(f) = &self.density {
            f.validate().map_err(at("density"))?;
        }
        let dim = self.dim();
        if let Some(g) = &self.graph {
            if let (GraphKind::Voronoi { .. } | GraphKind::Delaunay, Some(d)) = (g, dim) {
                if d != 2 {
                    return Err(Error::config("graph", format!("{} graphs need d = 2, got d = {d}", g.name())));
                }
            }
            if let GraphKind::Knn { k: 0, .. } = g {
                return Err(Error::config("graph.k", "k must be at least 1"));
            }
            if let GraphKind::Voronoi { clip: Some(w) } = g {
                w.validate().map_err(at("graph.clip"))?;
                if !matches!(w, Window::Box { .. }) {
                    return Err(Error::config("graph.clip", "Voronoi clip window must be a box"));
                }
            }
        }
        if let Some(xi) = &self.functional {
            xi.validate(dim.unwrap_or(2)).map_err(at("functional"))?;
        }
        if let Some(p) = &self.pattern {
            p.validate().map_err(at("pattern"))?;
        }
        if let Some(MarkKind::Radius(r)) = &self.marks {
            r.bound().map_err(at("marks"))?;
        }
        if let Some(r) = &self.radius {
            r.bound().map_err(at("radius"))?;
        }
        if let Some(VolumeMethod::MonteCarlo { samples: 0, .. }) = self.volume {
            return Err(Error::config("volume.samples", "Monte Carlo volume needs at least one sample"));
        }
        if self.n == Some(0) {
            return Err(Error::config("n", "must be at least 1"));
        }
        if self.n_grid.contains(&0) || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("n_grid", "must be positive and strictly ascending"));
        }
        if self.replicates == 0 {
            return Err(Error::config("replicates", "must be at least 1"));
        }
        self.probe.validate().map_err(at("probe"))?;
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::config("tau", format!("intensity must be positive, got {}", self.tau)));
        }
        match self.limit {
            LimitSource::Fixed { value } if !value.is_finite() => {
                return Err(Error::config("limit.value", "must be finite"))
            }
            LimitSource::Rhs {
                outer_samples,
                inner_replicates,
                ..
            } if outer_samples == 0 || inner_replicates == 0 => {
                return Err(Error::config("limit", "outer_samples and inner_replicates must be at least 1"))
            }
            _ => {}
        }
        if let Some(k) = self.coupling_radius {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::config("coupling_radius", "must be positive"));
            }
        }
        if let Some(g) = &self.ecdf_grid {
            if g.iter().any(|t| !t.is_finite()) || g.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::config("ecdf_grid", "must be finite and sorted ascending"));
            }
        }
        Ok(())
    }

    /// Checks the sections a task needs, on top of [`validate`](Self::validate).
    pub fn validate_for(&self, task: Task) -> Result<()> {
        self.validate()?;
        match task {
            Task::Sample => {
                self.density_for(task)?;
                self.n_for(task)?;
            }
            Task::Graph => {
                self.graph_for(task)?;
            }
            Task::Functional => {
                self.functional_for(task)?;
            }
            Task::Limit => {
                self.functional_for(task)?;
                self.density_for(task)?;
                if self.replicates < 2 {
                    return Err(Error::config("replicates", "at least two replicates are needed"));
                }
            }
            Task::Converge => {
                self.functional_for(task)?;
                self.density_for(task)?;
                if self.n_grid.is_empty() {
                    return Err(Error::config("n_grid", "required by task 'converge'"));
                }
                if self.replicates < 2 {
                    return Err(Error::config("replicates", "at least two replicates are needed"));
                }
            }
            Task::Couple => {
                self.density_for(task)?;
                self.need(&self.coupling_radius, "coupling_radius", task)?;
                if self.n_grid.is_empty() {
                    return Err(Error::config("n_grid", "required by task 'couple'"));
                }
                if self.replicates < 2 {
                    return Err(Error::config("replicates", "at least two replicates are needed"));
                }
            }
            Task::Boolean => {
                self.density_for(task)?;
                self.radius_for(task)?;
                self.n_for(task)?;
            }
            Task::Pack => {
                self.density_for(task)?;
                if self.n_grid.is_empty() {
                    return Err(Error::config("n_grid", "required by task 'pack'"));
                }
                if self.replicates < 2 {
                    return Err(Error::config("replicates", "at least two replicates are needed"));
                }
            }
        }
        Ok(())
    }
}

/// Prefixes a config location like `graph.clip` with the line where its
/// first key appears.
pub(crate) fn anchor(text: &str, e: Error) -> Error {
    let Error::Config { location, message } = e else {
        return e;
    };
    let key = location.split('.').next().unwrap_or_default();
    let needle = format!("\"{key}\"");
    match text.lines().position(|l| l.contains(&needle)) {
        Some(i) if !location.starts_with("line ") => Error::config(format!("line {} ({location})", i + 1), message),
        _ => Error::Config { location, message },
    }
}

/// Re-anchors an error at a config location.
fn at(loc: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Config { .. } => e,
        other => Error::config(loc, other.to_string()),
    }
}

fn task_name(t: Task) -> &'static str {
    match t {
        Task::Sample => "sample",
        Task::Graph => "graph",
        Task::Functional => "functional",
        Task::Limit => "limit",
        Task::Converge => "converge",
        Task::Couple => "couple",
        Task::Boolean => "boolean",
        Task::Pack => "pack",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// Replicate mean of `n^{-1} H_{ξ_n}(X_n)`.
    pub mean: f64,
    pub stderr: f64,
    /// `|mean − limit|`, when there is a limit.
    pub abs_error: Option<f64>,
    /// `sqrt(mean of (n^{-1} H − limit)²)`, when there is a limit.
    pub l2_error: Option<f64>,
    pub replicates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: f64,
    /// Zero for a fixed value.
    pub stderr: f64,
    pub source: &'static str,
    pub unstabilized_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub limit: Option<LimitEstimate>,
    pub rows: Vec<ConvergenceRow>,
}

impl ExperimentReport {
    /// CSV `n,mean,stderr,abs_error,l2_error,replicates`; missing errors are
    /// empty fields.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,mean,stderr,abs_error,l2_error,replicates")?;
        let opt = |v: Option<f64>| v.map(format_num).unwrap_or_default();
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.n,
                format_num(r.mean),
                format_num(r.stderr),
                opt(r.abs_error),
                opt(r.l2_error),
                r.replicates
            )?;
        }
        Ok(())
    }
}

/// One replicate of `n^{-1} H_{ξ_n}(X_n)`: `X_n` sampled from `density` with
/// the marks `ξ` reads, evaluated in rescaled coordinates `n^{1/d} X_n`
/// (Voronoi cells clipped to the rescaled bounding box of the density).
pub fn normalized_h(density: &DensitySpec, xi: &(impl Xi + ?Sized), n: usize, seed: Seed) -> Result<f64> {
    let pts = sample_binomial(density, n, seed.child("points", 0))?;
    let marked = match xi.mark_kind() {
        Some(kind) => attach_marks(pts, &kind, seed.child("marks", 0))?,
        None => MarkedPointSet::unmarked(pts),
    };
    let scene = Scene::new(marked).with_support(density.bounding_box());
    let d = density.dim() as f64;
    Ok(h_xi(&scene, xi, (n as f64).powf(1.0 / d))? / n as f64)
}

/// Runs the configured convergence experiment.
pub fn convergence_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate_for(Task::Converge)?;
    let density = config.density_for(Task::Converge)?;
    let xi = config.functional_for(Task::Converge)?;
    let seed = Seed(config.seed);
    let limit = match config.limit {
        LimitSource::Fixed { value } => Some(LimitEstimate {
            value,
            stderr: 0.0,
            source: "fixed",
            unstabilized_fraction: 0.0,
        }),
        LimitSource::Rhs {
            outer_samples,
            inner_replicates,
            method,
        } => {
            let est = rhs_integral(
                density,
                xi,
                &config.probe,
                outer_samples,
                inner_replicates,
                method,
                seed.child("limit", 0),
            )?;
            Some(LimitEstimate {
                value: est.mean,
                stderr: est.stderr,
                source: "rhs_integral",
                unstabilized_fraction: est.unstabilized_fraction,
            })
        }
        LimitSource::None => None,
    };
    let rows = config
        .n_grid
        .iter()
        .map(|&n| {
            let values: Vec<f64> = (0..config.replicates)
                .into_par_iter()
                .map(|r| normalized_h(density, xi, n, seed.child("converge", n as u64).child("replicate", r as u64)))
                .collect::<Result<_>>()?;
            let (mean, stderr) = super::mean_stderr(&values);
            let (abs_error, l2_error) = match &limit {
                Some(l) => (
                    Some((mean - l.value).abs()),
                    Some((values.iter().map(|v| (v - l.value).powi(2)).sum::<f64>() / values.len() as f64).sqrt()),
                ),
                None => (None, None),
            };
            Ok(ConvergenceRow {
                n,
                mean,
                stderr,
                abs_error,
                l2_error,
                replicates: config.replicates,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ExperimentReport {
        config: config.clone(),
        limit,
        rows,
    })
}
