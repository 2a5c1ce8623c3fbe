use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::metric::PointIndex;
use crate::error::{Error, Result};
use crate::trace::Trace;

/// Distance below which two vertices count as an intersection (pixels).
pub const NEAR_INTERSECTION: f64 = 2.0;

/// Domain whose first exit ends the δ-closeness check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Disk { center: Complex64, radius: f64 },
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
}

impl Region {
    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Region::Disk { center, radius } => (z - center).norm() < radius,
            Region::Rect { x0, y0, x1, y1 } => z.re > x0 && z.re < x1 && z.im > y0 && z.im < y1,
        }
    }
}

fn diameter_below(points: impl Iterator<Item = Complex64> + Clone, delta: f64) -> bool {
    let v: Vec<Complex64> = points.collect();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if (v[i] - v[j]).norm() >= delta {
                return false;
            }
        }
    }
    true
}

/// Discrete δ-closeness of `eta0` and `eta_theta` until `eta0` leaves `d`.
///
/// Every vertex `k` of `eta0` before its exit must lie between two
/// near-intersection vertices `i1 ≤ k ≤ i2` of `eta0`, matched with
/// vertices `j1 < j2` of `eta_theta`, such that the arcs `eta0[i1..=i2]`
/// and `eta_theta[j1..=j2]` together have diameter below `delta`. A vertex
/// that is itself a near intersection passes.
pub fn delta_close_check(eta0: &Trace, eta_theta: &Trace, d: &Region, delta: f64) -> Result<bool> {
    if eta0.is_empty() || eta_theta.is_empty() {
        return Err(Error::param("δ-closeness needs nonempty traces"));
    }
    if (eta0.points[0] - eta_theta.points[0]).norm() > 1e-9 {
        return Err(Error::param("traces must share their starting point"));
    }
    if !(delta > 0.0) {
        return Err(Error::param("δ must be positive"));
    }
    let exit = eta0.points.iter().position(|&z| !d.contains(z)).unwrap_or(eta0.len());
    let a = &eta0.points[..exit.max(1)];
    let b = &eta_theta.points;

    // near-intersection partners of each eta0 vertex, ascending
    let idx = PointIndex::new(b);
    let mut partners: Vec<Vec<usize>> = vec![Vec::new(); a.len()];
    let mut by_cell: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let key = |z: Complex64| ((z.re / NEAR_INTERSECTION).floor() as i64, (z.im / NEAR_INTERSECTION).floor() as i64);
    for (j, &z) in b.iter().enumerate() {
        by_cell.entry(key(z)).or_default().push(j);
    }
    for (i, &z) in a.iter().enumerate() {
        if idx.nearest(z) >= NEAR_INTERSECTION {
            continue;
        }
        let (cx, cy) = key(z);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = by_cell.get(&(cx + dx, cy + dy)) {
                    partners[i].extend(v.iter().copied().filter(|&j| (b[j] - z).norm() < NEAR_INTERSECTION));
                }
            }
        }
        partners[i].sort_unstable();
    }
    let near: Vec<usize> = (0..a.len()).filter(|&i| !partners[i].is_empty()).collect();

    let mut memo: HashMap<(usize, usize), bool> = HashMap::new();
    for k in 0..a.len() {
        if !partners[k].is_empty() {
            continue;
        }
        let pos = near.partition_point(|&i| i < k);
        if pos == 0 || pos == near.len() {
            return Ok(false);
        }
        let (i1, i2) = (near[pos - 1], near[pos]);
        let ok = *memo.entry((i1, i2)).or_insert_with(|| {
            // tightest matched pair j1 < j2
            let mut best: Option<(usize, usize)> = None;
            for &j2 in &partners[i2] {
                let p = partners[i1].partition_point(|&j| j < j2);
                if p > 0 {
                    let j1 = partners[i1][p - 1];
                    if best.is_none_or(|(a1, a2)| j2 - j1 < a2 - a1) {
                        best = Some((j1, j2));
                    }
                }
            }
            match best {
                Some((j1, j2)) => diameter_below(a[i1..=i2].iter().chain(&b[j1..=j2]).copied(), delta),
                None => false,
            }
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{Termination, TraceMeta};

    fn trace(points: Vec<Complex64>) -> Trace {
        let times = (0..points.len()).map(|i| i as f64).collect();
        Trace {
            meta: TraceMeta {
                origin: points[0],
                angle: None,
                termination: Termination::Complete,
            },
            points,
            times,
        }
    }

    fn wiggle(n: usize) -> Vec<Complex64> {
        (0..n).map(|i| Complex64::new((i as f64 * 0.2).sin() * 3.0, i as f64 * 0.5)).collect()
    }

    #[test]
    fn identical_traces_are_close() {
        let t = trace(wiggle(200));
        let d = Region::Disk {
            center: Complex64::new(0.0, 0.0),
            radius: 60.0,
        };
        assert!(delta_close_check(&t, &t, &d, 2.5).unwrap());
    }

    #[test]
    fn translated_trace_is_not_close() {
        let p = wiggle(200);
        let delta = 3.0;
        let mut q: Vec<_> = p.iter().map(|z| z + Complex64::new(3.0 * delta, 0.0)).collect();
        q[0] = p[0];
        let d = Region::Disk {
            center: Complex64::new(0.0, 0.0),
            radius: 60.0,
        };
        assert!(!delta_close_check(&trace(p.clone()), &trace(q), &d, delta).unwrap());
        let other = trace(vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]);
        assert!(delta_close_check(&trace(p), &other, &d, delta).is_err());
    }

    #[test]
    fn loop_of_diameter_below_delta_passes() {
        // eta_theta follows eta0 except for a small detour
        let p: Vec<_> = (0..100).map(|i| Complex64::new(0.0, i as f64 * 0.5)).collect();
        let mut q = p.clone();
        for (k, z) in q.iter_mut().enumerate().take(60).skip(40) {
            *z += Complex64::new(2.5 * ((k - 40) as f64 * std::f64::consts::PI / 20.0).sin(), 0.0);
        }
        let d = Region::Rect {
            x0: -10.0,
            y0: -1.0,
            x1: 10.0,
            y1: 100.0,
        };
        assert!(delta_close_check(&trace(p.clone()), &trace(q.clone()), &d, 12.0).unwrap());
        assert!(!delta_close_check(&trace(p), &trace(q), &d, 4.0).unwrap());
    }
}
