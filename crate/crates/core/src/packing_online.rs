//! Random sequential packing: balls arrive in order of their arrival marks
//! and are kept iff they do not overlap a ball kept earlier.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point_process::{attach_marks, sample_binomial, DensitySpec, MarkKind, MarkedPointSet};
use crate::rng::Seed;
use crate::spatial::{dist2, format_num, lex_cmp, unit_ball_volume, PointSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RsaResult {
    /// Per ball, in input order.
    pub packed: Vec<bool>,
    /// Number of packed balls `N`.
    pub count: usize,
}

/// Radius of a ball of volume `1/n` in `d` dimensions.
pub fn ball_radius(n: f64, d: usize) -> f64 {
    (n * unit_ball_volume(d)).powf(-1.0 / d as f64)
}

/// Packs balls of volume `1/n` centered at the marked points.
pub fn rsa_pack(marked: &MarkedPointSet, n: usize) -> Result<RsaResult> {
    if n == 0 {
        return Err(Error::arg("ball volume 1/n needs n ≥ 1"));
    }
    let arrival = marked
        .arrival
        .as_ref()
        .ok_or_else(|| Error::arg("on-line packing needs arrival marks"))?;
    Ok(rsa_pack_radius(&marked.points, arrival, ball_radius(n as f64, marked.points.dim())))
}

/// Packs equal balls of radius `r`, in increasing arrival order; ties go to
/// the lexicographically smaller center, then the smaller index. A ball is
/// blocked by a packed center at distance `≤ 2r`.
pub fn rsa_pack_radius(points: &PointSet, arrival: &[f64], r: f64) -> RsaResult {
    let n = points.len();
    let d = points.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        arrival[a]
            .total_cmp(&arrival[b])
            .then_with(|| lex_cmp(points.point(a), points.point(b)))
            .then(a.cmp(&b))
    });
    let cell = 2.0 * r;
    let reach = cell * cell;
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let mut packed = vec![false; n];
    let mut key = vec![0i64; d];
    let mut probe = vec![0i64; d];
    let offsets = 3usize.pow(d as u32);
    for i in order {
        let p = points.point(i);
        for k in 0..d {
            key[k] = (p[k] / cell).floor() as i64;
        }
        let blocked = (0..offsets).any(|mut o| {
            for k in 0..d {
                probe[k] = key[k] + (o % 3) as i64 - 1;
                o /= 3;
            }
            grid.get(&probe)
                .is_some_and(|cell| cell.iter().any(|&j| dist2(p, points.point(j)) <= reach))
        });
        if !blocked {
            packed[i] = true;
            grid.entry(key.clone()).or_default().push(i);
        }
    }
    RsaResult {
        count: packed.iter().filter(|&&b| b).count(),
        packed,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsaRow {
    pub n: usize,
    /// Replicate mean of `N/n`.
    pub mean: f64,
    pub stderr: f64,
    pub replicates: usize,
}

/// Packed fraction `N/n` over `replicates` independent samples per `n`.
/// Replicates run in parallel; results do not depend on the thread count.
pub fn rsa_fraction_experiment(
    density: &DensitySpec,
    n_grid: &[usize],
    replicates: usize,
    seed: Seed,
) -> Result<Vec<RsaRow>> {
    if replicates < 2 {
        return Err(Error::arg("need at least two replicates"));
    }
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] == 0 {
        return Err(Error::arg("n grid must be positive and strictly ascending"));
    }
    n_grid
        .iter()
        .map(|&n| {
            let fractions: Vec<f64> = (0..replicates)
                .into_par_iter()
                .map(|rep| {
                    let s = seed.child("rsa", n as u64).child("replicate", rep as u64);
                    let pts = sample_binomial(density, n, s)?;
                    let marked = attach_marks(pts, &MarkKind::Arrival, s)?;
                    Ok(rsa_pack(&marked, n)?.count as f64 / n as f64)
                })
                .collect::<Result<_>>()?;
            let (mean, stderr) = mean_stderr(&fractions);
            Ok(RsaRow {
                n,
                mean,
                stderr,
                replicates,
            })
        })
        .collect()
}

pub(crate) fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Table as CSV `n,mean,stderr,replicates`.
pub fn write_rsa_csv<W: Write>(rows: &[RsaRow], mut w: W) -> Result<()> {
    writeln!(w, "n,mean,stderr,replicates")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.n, format_num(r.mean), format_num(r.stderr), r.replicates)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn marked(rows: &[[f64; 1]], arrival: &[f64]) -> MarkedPointSet {
        MarkedPointSet {
            points: PointSet::from_rows(1, rows).unwrap(),
            arrival: Some(arrival.to_vec()),
            radius: None,
        }
    }

    #[test]
    fn trivial_cases() {
        let one = marked(&[[0.5]], &[0.3]);
        assert_eq!(rsa_pack(&one, 1).unwrap().count, 1);
        let same = marked(&[[0.5], [0.5], [0.5]], &[0.3, 0.1, 0.2]);
        let r = rsa_pack(&same, 3).unwrap();
        assert_eq!(r.count, 1);
        assert_eq!(r.packed, vec![false, true, false]);
        let apart = marked(&[[0.0], [0.5], [1.0]], &[0.1, 0.2, 0.3]);
        assert_eq!(rsa_pack(&apart, 3).unwrap().count, 3);
    }

    #[test]
    fn closed_blocking() {
        // radius 1/(2n) = 0.25 in d = 1, so centers 0.5 apart touch
        let m = marked(&[[0.0], [0.5]], &[0.1, 0.2]);
        assert_eq!(rsa_pack(&m, 2).unwrap().count, 1);
        assert!((ball_radius(2.0, 1) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn experiment_is_reproducible() {
        let f = DensitySpec::uniform_unit_cube(1);
        let a = rsa_fraction_experiment(&f, &[50, 100], 4, Seed(1)).unwrap();
        let b = rsa_fraction_experiment(&f, &[50, 100], 4, Seed(1)).unwrap();
        assert_eq!(a, b);
        let mut buf = Vec::new();
        write_rsa_csv(&a, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("n,mean,stderr,replicates\n50,"));
        assert!(rsa_fraction_experiment(&f, &[100, 50], 4, Seed(1)).is_err());
    }
}
