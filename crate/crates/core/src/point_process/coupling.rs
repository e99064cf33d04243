//! The binomial/Cox coupling around a random anchor `X ~ f`.
//!
//! One unit-rate Poisson process on `bbox × [0, n·sup f]` drives everything:
//!
//! * `P(n)` keeps the points with `t <= n f(x)`; it is Poisson with intensity
//!   `n f`. Discarding `(N(n) - (n-1))^+` of them at random, or adding
//!   `(n-1-N(n))^+` fresh draws from `f`, gives `X'_{n-1}`, distributed as an
//!   `(n-1)`-point binomial process.
//! * `H_n` keeps the points with `t <= n f(X)` and maps them by
//!   `x -> n^{1/d} (x - X)`.
//!
//! Near a Lebesgue point of `f` the two rescaled sets agree in a fixed ball
//! with probability tending to one. Because the shared points go through the
//! same arithmetic, agreement is exact coordinate equality.
//!
//! The `t` axis is cut at `n·sup f`, which loses nothing since both
//! thresholds lie below it; space is cut to the density's bounding box.

use rand::seq::index::sample as sample_indices;
use rand::Rng;

use super::{poisson_count, DensitySpec};
use crate::error::Result;
use crate::rng::Seed;
use crate::spatial::{dist2, lex_cmp, PointSet};

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPair {
    /// `n^{1/d}(X'_{n-1} - X) ∩ B(0; K)`, lexicographically sorted.
    pub rescaled_binomial: PointSet,
    /// `H_n ∩ B(0; K)`, lexicographically sorted.
    pub cox: PointSet,
    pub anchor: Vec<f64>,
    pub anchor_density: f64,
    /// Points discarded from or added to `P(n)`: `N(n) - (n-1)`.
    pub surplus: i64,
}

impl CoupledPair {
    /// Exact set equality of the two clipped configurations.
    pub fn matches(&self) -> bool {
        self.rescaled_binomial == self.cox
    }
}

pub fn sample_coupled_pair(density: &DensitySpec, n: usize, window_radius: f64, seed: Seed) -> Result<CoupledPair> {
    density.validate()?;
    if n < 2 {
        return Err(crate::Error::arg("coupling needs n >= 2"));
    }
    if !(window_radius > 0.0) {
        return Err(crate::Error::arg("window radius must be positive"));
    }
    let d = density.dim();
    let bbox = density.bounding_box();
    let sup = density.sup();
    let nf = n as f64;
    let scale = nf.powf(1.0 / d as f64);
    let k2 = window_radius * window_radius;

    let mut anchor = vec![0.0; d];
    density.sample_one(&mut seed.stream("coupling/anchor", 0), &mut anchor);
    let anchor_density = density.eval(&anchor);

    let mut rng = seed.stream("coupling/driver", 0);
    let total = poisson_count(&mut rng, bbox.volume() * nf * sup);
    let mut x = vec![0.0; d];
    let mut binomial_pool = PointSet::with_capacity(d, n);
    let mut cox = PointSet::new(d);
    let mut rescaled = vec![0.0; d];
    for _ in 0..total {
        bbox.sample_uniform(&mut rng, &mut x);
        let t = rng.random::<f64>() * nf * sup;
        if t <= nf * density.eval(&x) {
            binomial_pool.push(&x);
        }
        if t <= nf * anchor_density {
            rescale(&x, &anchor, scale, &mut rescaled);
            if dist2(&rescaled, &vec![0.0; d]) <= k2 {
                cox.push(&rescaled);
            }
        }
    }

    let big_n = binomial_pool.len();
    let surplus = big_n as i64 - (n as i64 - 1);
    let mut keep: Vec<bool> = vec![true; big_n];
    if surplus > 0 {
        let mut drng = seed.stream("coupling/discard", 0);
        for i in sample_indices(&mut drng, big_n, surplus as usize) {
            keep[i] = false;
        }
    }
    let mut binomial = PointSet::new(d);
    for (i, p) in binomial_pool.iter().enumerate() {
        if keep[i] {
            rescale(p, &anchor, scale, &mut rescaled);
            if dist2(&rescaled, &vec![0.0; d]) <= k2 {
                binomial.push(&rescaled);
            }
        }
    }
    if surplus < 0 {
        let mut arng = seed.stream("coupling/augment", 0);
        for _ in 0..(-surplus) {
            density.sample_one(&mut arng, &mut x);
            rescale(&x, &anchor, scale, &mut rescaled);
            if dist2(&rescaled, &vec![0.0; d]) <= k2 {
                binomial.push(&rescaled);
            }
        }
    }

    Ok(CoupledPair {
        rescaled_binomial: sorted(binomial),
        cox: sorted(cox),
        anchor,
        anchor_density,
        surplus,
    })
}

fn rescale(x: &[f64], anchor: &[f64], scale: f64, out: &mut [f64]) {
    for k in 0..x.len() {
        out[k] = scale * (x[k] - anchor[k]);
    }
}

fn sorted(ps: PointSet) -> PointSet {
    let mut idx: Vec<usize> = (0..ps.len()).collect();
    idx.sort_by(|&a, &b| lex_cmp(ps.point(a), ps.point(b)));
    ps.select(&idx)
}
