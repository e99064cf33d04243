//! Limits of `n^{-1} H_ξ` by the objective method: the value of `ξ` at the
//! origin of a Poisson process, detected as stabilized on a schedule of
//! growing windows, averaged into the constants that appear in the laws of
//! large numbers; plus the binomial/Cox coupling census and finite-`n`
//! convergence experiments.
//!
//! Replicates run in parallel on per-replicate streams and are reduced in
//! replicate order, so every result is independent of the thread count.

mod experiment;
mod stabilization;

use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::functionals::{EdgeShare, WeightFn, Xi, XiSpec};
use crate::graphs::GraphKind;
use crate::point_process::{sample_coupled_pair, DensitySpec};
use crate::rng::Seed;

pub use experiment::{
    convergence_experiment, ConvergenceRow, ExperimentConfig, ExperimentReport, LimitEstimate, LimitSource, Outputs,
    Task,
};
pub use stabilization::{poisson_with_origin, xi_infinity_sample, MatchRule, StabilizationProbe, XiInfinitySample};

/// Confidence level of reported intervals.
pub const CONFIDENCE: f64 = 0.95;

/// A Monte Carlo estimate with its normal-approximation interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub mean: f64,
    pub stderr: f64,
    /// Samples that entered the mean.
    pub replicates: usize,
    /// Samples drawn, including those discarded as unstabilized.
    pub total: usize,
    pub unstabilized_fraction: f64,
    pub confidence: f64,
    pub interval: (f64, f64),
}

impl EstimateResult {
    pub fn from_parts(mean: f64, stderr: f64, replicates: usize, total: usize) -> Self {
        let z = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.5 + CONFIDENCE / 2.0);
        EstimateResult {
            mean,
            stderr,
            replicates,
            total,
            unstabilized_fraction: if total == 0 { 0.0 } else { 1.0 - replicates as f64 / total as f64 },
            confidence: CONFIDENCE,
            interval: (mean - z * stderr, mean + z * stderr),
        }
    }

    /// Mean and standard error of `xs`, out of `total` draws.
    pub fn from_samples(xs: &[f64], total: usize) -> Self {
        let (mean, stderr) = mean_stderr(xs);
        Self::from_parts(mean, stderr, xs.len(), total)
    }
}

/// Sample mean and standard error (`n − 1` normalizer).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    crate::packing_online::mean_stderr(xs)
}

fn check_replicates(r: usize) -> Result<()> {
    if r < 2 {
        Err(Error::arg(format!("need at least two replicates, got {r}")))
    } else {
        Ok(())
    }
}

/// Stabilized samples of `ξ_∞(P_τ)`, in replicate order, and the number drawn.
fn stabilized_samples(
    xi: &(impl Xi + ?Sized),
    tau: f64,
    d: usize,
    probe: &StabilizationProbe,
    replicates: usize,
    seed: Seed,
) -> Result<Vec<f64>> {
    let samples: Vec<XiInfinitySample> = (0..replicates)
        .into_par_iter()
        .map(|r| xi_infinity_sample(xi, tau, d, probe, seed.child("replicate", r as u64)))
        .collect::<Result<_>>()?;
    Ok(samples.iter().filter(|s| s.stabilized).map(|s| s.value).collect())
}

/// `E[ξ_∞(P_τ)]` over stabilized replicates; the discarded fraction is
/// reported with the estimate.
pub fn estimate_e_xi_infinity(
    xi: &(impl Xi + ?Sized),
    tau: f64,
    d: usize,
    probe: &StabilizationProbe,
    replicates: usize,
    seed: Seed,
) -> Result<EstimateResult> {
    check_replicates(replicates)?;
    let kept = stabilized_samples(xi, tau, d, probe, replicates, seed)?;
    if kept.is_empty() {
        return Err(Error::Unstabilized { replicates });
    }
    Ok(EstimateResult::from_samples(&kept, replicates))
}

/// `C_G = ½ E Σ_{e ∋ 0} φ(|e|)` in `G(P_{1,0})`.
pub fn limiting_constant_c(
    graph: &GraphKind,
    phi: &WeightFn,
    d: usize,
    probe: &StabilizationProbe,
    replicates: usize,
    seed: Seed,
) -> Result<EstimateResult> {
    let xi = XiSpec::EdgeWeight {
        graph: graph.clone(),
        phi: phi.clone(),
        share: EdgeShare::Half,
    };
    xi.validate(d)?;
    estimate_e_xi_infinity(&xi, 1.0, d, probe, replicates, seed)
}

/// How [`rhs_integral`] evaluates `∫ E[ξ_∞(P_{f(x)})] f(x) dx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum RhsMethod {
    /// Homogeneous shortcut when `ξ` declares an order, nested otherwise.
    #[default]
    Auto,
    /// Outer draws `x ~ f`, inner estimates at intensity `f(x)`.
    Nested,
    /// `E[ξ_∞(P_1)] · ∫ f^{(d−γ)/d}` for `ξ` homogeneous of order `γ`.
    Homogeneous,
}

/// `∫ E[ξ_∞(P_{f(x)})] f(x) dx`.
///
/// The nested estimator averages `outer_samples` inner estimates of
/// `inner_replicates` replicates each. The homogeneous one spends the same
/// `outer_samples · inner_replicates` replicates at intensity 1 and uses
/// `∫ f^{(d−γ)/d}` in closed form where available, otherwise the importance
/// sampling estimate `E_f[f^{−γ/d}]`.
#[allow(clippy::too_many_arguments)]
pub fn rhs_integral(
    density: &DensitySpec,
    xi: &(impl Xi + ?Sized),
    probe: &StabilizationProbe,
    outer_samples: usize,
    inner_replicates: usize,
    method: RhsMethod,
    seed: Seed,
) -> Result<EstimateResult> {
    density.validate()?;
    if outer_samples == 0 || inner_replicates == 0 {
        return Err(Error::arg("rhs integral needs at least one outer sample and one inner replicate"));
    }
    let d = density.dim();
    let gamma = xi.homogeneity();
    let homogeneous = match (method, gamma) {
        (RhsMethod::Nested, _) | (RhsMethod::Auto, None) => None,
        (_, Some(g)) => Some(g),
        (RhsMethod::Homogeneous, None) => {
            return Err(Error::arg("the homogeneous shortcut needs a functional with a declared order"))
        }
    };
    if let Some(gamma) = homogeneous {
        let reps = (outer_samples * inner_replicates).max(2);
        let e1 = estimate_e_xi_infinity(xi, 1.0, d, probe, reps, seed.child("rhs/unit", 0))?;
        let (integral, int_se) = match density.integral_of_power((d as f64 - gamma) / d as f64) {
            Some(v) => (v, 0.0),
            None => {
                let pts = crate::point_process::sample_binomial(density, reps, seed.child("rhs/importance", 0))?;
                let w: Vec<f64> = pts.iter().map(|x| density.eval(x).powf(-gamma / d as f64)).collect();
                mean_stderr(&w)
            }
        };
        let mean = e1.mean * integral;
        let stderr = ((integral * e1.stderr).powi(2) + (e1.mean * int_se).powi(2)).sqrt();
        return Ok(EstimateResult::from_parts(mean, stderr, e1.replicates, e1.total));
    }
    let xs = crate::point_process::sample_binomial(density, outer_samples, seed.child("rhs/outer", 0))?;
    let inner: Vec<(Vec<f64>, usize)> = (0..outer_samples)
        .map(|j| {
            let fx = density.eval(xs.point(j));
            if !(fx > 0.0) {
                return Err(Error::InvalidDensity(format!("f vanishes at a sampled point {:?}", xs.point(j))));
            }
            let kept = stabilized_samples(xi, fx, d, probe, inner_replicates, seed.child("rhs/inner", j as u64))?;
            Ok((kept, inner_replicates))
        })
        .collect::<Result<_>>()?;
    let means: Vec<f64> = inner
        .iter()
        .filter(|(k, _)| !k.is_empty())
        .map(|(k, _)| k.iter().sum::<f64>() / k.len() as f64)
        .collect();
    let total = outer_samples * inner_replicates;
    let kept: usize = inner.iter().map(|(k, _)| k.len()).sum();
    if means.is_empty() {
        return Err(Error::Unstabilized { replicates: total });
    }
    let (mean, stderr) = if means.len() >= 2 {
        mean_stderr(&means)
    } else {
        mean_stderr(&inner.iter().find(|(k, _)| !k.is_empty()).unwrap().0)
    };
    Ok(EstimateResult::from_parts(mean, stderr, kept, total))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingRow {
    pub n: usize,
    pub probability: f64,
    pub stderr: f64,
    pub replicates: usize,
}

/// Fraction of replicates in which the rescaled binomial sample and the Cox
/// process coincide exactly on `B(0; K)`.
pub fn coupling_curve(
    density: &DensitySpec,
    k: f64,
    n_grid: &[usize],
    replicates: usize,
    seed: Seed,
) -> Result<Vec<CouplingRow>> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::arg(format!("coupling radius must be positive, got {k}")));
    }
    check_replicates(replicates)?;
    n_grid
        .iter()
        .map(|&n| {
            let hits: Vec<bool> = (0..replicates)
                .into_par_iter()
                .map(|r| {
                    let s = seed.child("coupling", n as u64).child("replicate", r as u64);
                    Ok(sample_coupled_pair(density, n, k, s)?.matches())
                })
                .collect::<Result<_>>()?;
            let p = hits.iter().filter(|&&h| h).count() as f64 / replicates as f64;
            Ok(CouplingRow {
                n,
                probability: p,
                stderr: (p * (1.0 - p) / replicates as f64).sqrt(),
                replicates,
            })
        })
        .collect()
}
