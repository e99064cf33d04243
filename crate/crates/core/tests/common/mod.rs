//! Brute-force reference implementations. Each one is deliberately naive and
//! shares no code with the library beyond `PointSet`.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use geomlaw::spatial::PointSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn d2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

pub fn uniform_points<R: Rng>(rng: &mut R, n: usize, d: usize) -> PointSet {
    PointSet::from_flat(d, (0..n * d).map(|_| rng.random::<f64>()).collect()).unwrap()
}

/// Points on a small integer lattice, without repeats: plenty of equal
/// distances and cocircular quadruples.
pub fn lattice_points<R: Rng>(rng: &mut R, n: usize, side: i64) -> PointSet {
    let mut seen = BTreeSet::new();
    while seen.len() < n {
        seen.insert((rng.random_range(0..side), rng.random_range(0..side)));
    }
    PointSet::from_rows(2, seen.into_iter().map(|(x, y)| [x as f64, y as f64])).unwrap()
}

/// Kruskal over all pairs with ties broken by (length, i, j).
pub fn kruskal_complete(ps: &PointSet) -> BTreeSet<(usize, usize)> {
    let n = ps.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((d2(ps.point(i), ps.point(j)).sqrt(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut label: Vec<usize> = (0..n).collect();
    let mut out = BTreeSet::new();
    for (_, i, j) in pairs {
        let (li, lj) = (label[i], label[j]);
        if li != lj {
            for l in label.iter_mut() {
                if *l == lj {
                    *l = li;
                }
            }
            out.insert((i, j));
        }
    }
    out
}

/// k nearest by linear scan, ties by lexicographic position then index.
pub fn knn_scan(ps: &PointSet, k: usize, directed: bool) -> BTreeSet<(usize, usize)> {
    let n = ps.len();
    let mut out = BTreeSet::new();
    for i in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        others.sort_by(|&a, &b| {
            d2(ps.point(i), ps.point(a))
                .total_cmp(&d2(ps.point(i), ps.point(b)))
                .then_with(|| lex(ps.point(a), ps.point(b)))
                .then(a.cmp(&b))
        });
        for &j in &others[..k] {
            out.insert(if directed { (i, j) } else { (i.min(j), i.max(j)) });
        }
    }
    out
}

pub fn sig_scan(ps: &PointSet) -> BTreeSet<(usize, usize)> {
    let n = ps.len();
    let r: Vec<f64> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| d2(ps.point(i), ps.point(j)).sqrt()).fold(f64::INFINITY, f64::min))
        .collect();
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            if d2(ps.point(i), ps.point(j)).sqrt() <= r[i] + r[j] {
                out.insert((i, j));
            }
        }
    }
    out
}

fn empty_region(ps: &PointSet, blocks: impl Fn(&[f64], &[f64], &[f64]) -> bool) -> BTreeSet<(usize, usize)> {
    let n = ps.len();
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            if !(0..n).any(|z| z != i && z != j && blocks(ps.point(i), ps.point(j), ps.point(z))) {
                out.insert((i, j));
            }
        }
    }
    out
}

pub fn gabriel_scan(ps: &PointSet) -> BTreeSet<(usize, usize)> {
    // z strictly inside the diametral ball: |z-m|^2 < |x-y|^2 / 4
    empty_region(ps, |x, y, z| {
        let m: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
        4.0 * d2(z, &m) < d2(x, y)
    })
}

pub fn rng_scan(ps: &PointSet) -> BTreeSet<(usize, usize)> {
    empty_region(ps, |x, y, z| {
        let l = d2(x, y);
        d2(x, z) < l && d2(y, z) < l
    })
}

pub fn bfs_components(n: usize, edges: &BTreeSet<(usize, usize)>) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = c;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    q.push_back(w);
                }
            }
        }
        c += 1;
    }
    comp
}

/// Size of a maximum independent set by plain exhaustive recursion.
pub fn brute_mis(n: usize, edges: &BTreeSet<(usize, usize)>) -> usize {
    assert!(n <= 40);
    let mut nb = vec![0u64; n];
    for &(a, b) in edges {
        nb[a] |= 1 << b;
        nb[b] |= 1 << a;
    }
    fn go(cand: u64, nb: &[u64]) -> usize {
        if cand == 0 {
            return 0;
        }
        let v = cand.trailing_zeros() as usize;
        let skip = go(cand & !(1 << v), nb);
        let take = 1 + go(cand & !(1 << v) & !nb[v], nb);
        skip.max(take)
    }
    go(if n == 64 { u64::MAX } else { (1u64 << n) - 1 }, &nb)
}

/// Euler characteristic of a union of closed disks from a raster: a pixel is
/// foreground when its closed square meets the union (so exterior wedges
/// narrower than a pixel at circle crossings are filled rather than pinched
/// off as spurious holes); 8-connected foreground, 4-connected background.
pub fn pixel_euler(disks: &[([f64; 2], f64)], res: usize) -> i64 {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for (c, r) in disks {
        for a in 0..2 {
            lo[a] = lo[a].min(c[a] - r);
            hi[a] = hi[a].max(c[a] + r);
        }
    }
    let side = (hi[0] - lo[0]).max(hi[1] - lo[1]) * 1.02;
    let h = side / res as f64;
    let (x0, y0) = (lo[0] - 0.01 * side, lo[1] - 0.01 * side);
    let w = res + 2;
    let mut fg = vec![false; w * w];
    for iy in 0..w {
        let y = y0 + (iy as f64 - 1.0) * h;
        for ix in 0..w {
            let x = x0 + (ix as f64 - 1.0) * h;
            fg[iy * w + ix] = disks.iter().any(|(c, r)| {
                let dx = c[0] - c[0].clamp(x, x + h);
                let dy = c[1] - c[1].clamp(y, y + h);
                dx * dx + dy * dy <= r * r
            });
        }
    }
    let count = |want: bool, eight: bool| {
        let mut seen = vec![false; w * w];
        let mut comps = 0i64;
        for s in 0..w * w {
            if fg[s] != want || seen[s] {
                continue;
            }
            comps += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(p) = stack.pop() {
                let (px, py) = ((p % w) as i64, (p / w) as i64);
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if (dx == 0 && dy == 0) || (!eight && dx != 0 && dy != 0) {
                            continue;
                        }
                        let (qx, qy) = (px + dx, py + dy);
                        if qx < 0 || qy < 0 || qx >= w as i64 || qy >= w as i64 {
                            continue;
                        }
                        let q = qy as usize * w + qx as usize;
                        if fg[q] == want && !seen[q] {
                            seen[q] = true;
                            stack.push(q);
                        }
                    }
                }
            }
        }
        comps
    };
    count(true, true) - (count(false, false) - 1)
}

/// Area of the intersection of two disks.
pub fn lens_area(r1: f64, r2: f64, d: f64) -> f64 {
    if d >= r1 + r2 {
        return 0.0;
    }
    if d <= (r1 - r2).abs() {
        return std::f64::consts::PI * r1.min(r2).powi(2);
    }
    let a1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).acos();
    let a2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).acos();
    r1 * r1 * (a1 - a1.sin() * a1.cos()) + r2 * r2 * (a2 - a2.sin() * a2.cos())
}

/// Sequential 1-d parking: points in arrival order, accepted when no
/// accepted point lies within `2r`. Uses an ordered set, not a grid.
pub fn rsa_ordered_1d(xs: &[f64], order: &[usize], r: f64) -> usize {
    let mut packed = BTreeSet::new();
    for &i in order {
        let x = xs[i];
        let near = packed
            .range(ordered(x - 2.0 * r)..=ordered(x + 2.0 * r))
            .next()
            .is_some();
        if !near {
            packed.insert(ordered(x));
        }
    }
    packed.len()
}

/// Order-preserving map from floats to integers.
fn ordered(v: f64) -> i64 {
    let b = v.to_bits() as i64;
    if b < 0 { b ^ i64::MAX } else { b }
}
