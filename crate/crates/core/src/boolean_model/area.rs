//! Exact area of a union of disks by integrating `½(x dy − y dx)` over the
//! uncovered boundary arcs.

use std::f64::consts::TAU;

/// Area of the union of the disks `(center, radius)`.
pub fn disk_union_area(disks: &[([f64; 2], f64)]) -> f64 {
    let mut area = 0.0;
    for (i, &(c, r)) in disks.iter().enumerate() {
        let mut covered: Vec<(f64, f64)> = Vec::new();
        let mut swallowed = false;
        for (j, &(cj, rj)) in disks.iter().enumerate() {
            if i == j {
                continue;
            }
            let (dx, dy) = (cj[0] - c[0], cj[1] - c[1]);
            let d = dx.hypot(dy);
            if d + r <= rj {
                // identical disks: the lower index keeps its boundary
                if !(d == 0.0 && r == rj && i < j) {
                    swallowed = true;
                    break;
                }
                continue;
            }
            if d >= r + rj || d + rj <= r {
                continue;
            }
            let cos = ((r * r + d * d - rj * rj) / (2.0 * r * d)).clamp(-1.0, 1.0);
            let half = cos.acos();
            let mid = dy.atan2(dx);
            let lo = (mid - half).rem_euclid(TAU);
            let hi = lo + 2.0 * half;
            if hi > TAU {
                covered.push((lo, TAU));
                covered.push((0.0, hi - TAU));
            } else {
                covered.push((lo, hi));
            }
        }
        if swallowed {
            continue;
        }
        covered.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut at = 0.0;
        for (lo, hi) in covered {
            if lo > at {
                area += arc_integral(c, r, at, lo);
            }
            at = f64::max(at, hi);
        }
        if at < TAU {
            area += arc_integral(c, r, at, TAU);
        }
    }
    area
}

/// `½∫(x dy − y dx)` along the circle arc from angle `a` to `b`.
fn arc_integral(c: [f64; 2], r: f64, a: f64, b: f64) -> f64 {
    0.5 * (r * r * (b - a) + c[0] * r * (b.sin() - a.sin()) - c[1] * r * (b.cos() - a.cos()))
}

/// Length of the union of closed intervals `[c − r, c + r]`.
pub fn interval_union_length(intervals: &[(f64, f64)]) -> f64 {
    let mut iv: Vec<(f64, f64)> = intervals.iter().map(|&(c, r)| (c - r, c + r)).collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (lo, hi) in iv {
        cur = match cur {
            Some((a, b)) if lo <= b => Some((a, b.max(hi))),
            Some((a, b)) => {
                total += b - a;
                Some((lo, hi))
            }
            None => Some((lo, hi)),
        };
    }
    if let Some((a, b)) = cur {
        total += b - a;
    }
    total
}
