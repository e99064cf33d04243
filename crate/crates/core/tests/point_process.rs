use std::f64::consts::PI;

use geomlaw::point_process::{attach_marks, sample_binomial, sample_coupled_pair, sample_poisson, DensitySpec, MarkKind};
use geomlaw::spatial::Window;
use geomlaw::Seed;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn sub_box_counts_are_binomial() {
    let n = 10_000;
    let ps = sample_binomial(&DensitySpec::uniform_unit_cube(2), n, Seed(1)).unwrap();
    for (lo, hi) in [([0.0, 0.0], [0.5, 0.5]), ([0.2, 0.1], [0.9, 0.4]), ([0.0, 0.0], [0.1, 1.0])] {
        let a = (hi[0] - lo[0]) * (hi[1] - lo[1]);
        let count = ps.iter().filter(|p| (0..2).all(|k| p[k] >= lo[k] && p[k] < hi[k])).count() as f64;
        let sd = (n as f64 * a * (1.0 - a)).sqrt();
        assert!((count - n as f64 * a).abs() <= 4.0 * sd);
    }
}

#[test]
fn grid_cells_receive_their_mass() {
    let n = 20_000;
    let ps = sample_binomial(&DensitySpec::two_level(0.9), n, Seed(2)).unwrap();
    let left = ps.iter().filter(|p| p[0] < 0.5).count() as f64;
    let sd = (n as f64 * 0.9 * 0.1).sqrt();
    assert!((left - 0.9 * n as f64).abs() <= 4.0 * sd);
}

#[test]
fn poisson_counts_have_the_right_mean() {
    let w = Window::cube(2, 0.0, 10.0);
    let counts: Vec<f64> = (0..100).map(|r| sample_poisson(2.0, &w, Seed(3).child("r", r), false).unwrap().len() as f64).collect();
    let mean = counts.iter().sum::<f64>() / 100.0;
    // the mean of 100 Poisson(200) counts has sd √200 / 10
    assert!((mean - 200.0).abs() <= 4.0 * 200f64.sqrt() / 10.0, "{mean}");
}

#[test]
fn arrival_ranks_are_uniform() {
    let k = 5;
    let reps = 5000;
    let pts = sample_binomial(&DensitySpec::uniform_unit_cube(1), k, Seed(4)).unwrap();
    let mut hist = vec![0.0; k];
    for r in 0..reps {
        let a = attach_marks(pts.clone(), &MarkKind::Arrival, Seed(5).child("r", r)).unwrap().arrival.unwrap();
        let rank = a.iter().filter(|&&x| x < a[0]).count();
        hist[rank] += 1.0;
    }
    let expected = reps as f64 / k as f64;
    let chi2: f64 = hist.iter().map(|o| (o - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new((k - 1) as f64).unwrap().inverse_cdf(0.99);
    assert!(chi2 < critical, "chi² = {chi2}");
}

#[test]
fn coupled_counts_are_poisson_like() {
    let k = (5.0 / PI).sqrt();
    let reps = 400;
    let (mut a, mut b) = (0.0, 0.0);
    for r in 0..reps {
        let pair = sample_coupled_pair(&DensitySpec::uniform_unit_cube(2), 10_000, k, Seed(6).child("r", r)).unwrap();
        a += pair.rescaled_binomial.len() as f64;
        b += pair.cox.len() as f64;
    }
    let se = (5.0 / reps as f64).sqrt();
    // anchors near the boundary see fewer points, so only an upper bound and a loose lower one
    for mean in [a / reps as f64, b / reps as f64] {
        assert!(mean <= 5.0 + 4.0 * se && mean >= 5.0 * 0.9 - 4.0 * se, "{mean}");
    }
}
