//! Samplers: binomial processes with density `f`, homogeneous Poisson
//! processes (optionally with a point at the origin), independent marks, and
//! the binomial/Cox coupling around a random anchor.
//!
//! All samplers are pure functions of their arguments and a [`Seed`]; each
//! purpose draws from its own stream so that, for example, changing the mark
//! seed never moves a point.

mod coupling;
mod density;
mod marks;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

pub use coupling::{sample_coupled_pair, CoupledPair};
pub use density::DensitySpec;
pub use marks::{attach_marks, MarkKind, MarkedPointSet, RadiusDist};

use crate::error::{Error, Result};
use crate::rng::Seed;
use crate::spatial::{PointSet, Window};

/// `n` i.i.d. points with density `f`.
pub fn sample_binomial(density: &DensitySpec, n: usize, seed: Seed) -> Result<PointSet> {
    Ok(sample_binomial_counted(density, n, seed)?.0)
}

/// As [`sample_binomial`], also returning the number of rejection proposals.
pub fn sample_binomial_counted(density: &DensitySpec, n: usize, seed: Seed) -> Result<(PointSet, u64)> {
    density.validate()?;
    if !(density.sup() > 0.0) {
        return Err(Error::InvalidDensity("sup f must be positive".into()));
    }
    let d = density.dim();
    let mut rng = seed.stream("binomial", 0);
    let mut out = PointSet::with_capacity(d, n);
    let mut buf = vec![0.0; d];
    let mut attempts = 0;
    for _ in 0..n {
        attempts += density.sample_one(&mut rng, &mut buf);
        out.push(&buf);
    }
    Ok((out, attempts))
}

/// Homogeneous Poisson process of intensity `tau` on `window`. With
/// `with_origin` the origin is placed at index 0.
pub fn sample_poisson(tau: f64, window: &Window, seed: Seed, with_origin: bool) -> Result<PointSet> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::arg(format!("intensity must be positive, got {tau}")));
    }
    window.validate()?;
    let d = window.dim();
    if with_origin && !window.contains(&vec![0.0; d]) {
        return Err(Error::arg("window must contain the origin"));
    }
    let mut rng = seed.stream("poisson", 0);
    let count = poisson_count(&mut rng, tau * window.volume());
    let mut out = PointSet::with_capacity(d, count + 1);
    if with_origin {
        out.push(&vec![0.0; d]);
    }
    let mut buf = vec![0.0; d];
    for _ in 0..count {
        window.sample_uniform(&mut rng, &mut buf);
        out.push(&buf);
    }
    Ok(out)
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive finite mean").sample(rng) as usize
}
