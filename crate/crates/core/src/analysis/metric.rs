use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which distance `hausdorff_distance` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    /// `|φ(z) - φ(w)|` with `φ(z) = (z-i)/(z+i)`.
    Bounded,
}

/// Point at infinity: any non-finite coordinate.
pub fn is_infinite(z: Complex64) -> bool {
    !z.re.is_finite() || !z.im.is_finite()
}

/// Cayley map of the closed upper half-plane onto the closed disk;
/// `φ(∞) = 1`.
pub fn phi(z: Complex64) -> Result<Complex64> {
    if is_infinite(z) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if z.im < 0.0 {
        return Err(Error::Domain(format!("{z} is in the lower half-plane")));
    }
    let i = Complex64::i();
    Ok((z - i) / (z + i))
}

/// `d(z, w) = |φ(z) - φ(w)|`.
pub fn bounded_metric(z: Complex64, w: Complex64) -> Result<f64> {
    Ok((phi(z)? - phi(w)?).norm())
}

/// Uniform-grid index for nearest-neighbour queries.
pub struct PointIndex {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<Complex64>>,
    lo: (i64, i64),
    hi: (i64, i64),
}

impl PointIndex {
    pub fn new(points: &[Complex64]) -> Self {
        assert!(!points.is_empty());
        let (mut lo, mut hi) = (points[0], points[0]);
        for p in points {
            lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        let extent = (hi.re - lo.re).max(hi.im - lo.im);
        let cell = if extent > 0.0 {
            (extent / (points.len() as f64).sqrt()).max(extent * 1e-6)
        } else {
            1.0
        };
        let mut buckets: HashMap<(i64, i64), Vec<Complex64>> = HashMap::new();
        for &p in points {
            buckets.entry(Self::key_of(p, cell)).or_default().push(p);
        }
        Self {
            cell,
            buckets,
            lo: Self::key_of(lo, cell),
            hi: Self::key_of(hi, cell),
        }
    }

    fn key_of(p: Complex64, cell: f64) -> (i64, i64) {
        ((p.re / cell).floor() as i64, (p.im / cell).floor() as i64)
    }

    /// Distance from `q` to the nearest indexed point.
    pub fn nearest(&self, q: Complex64) -> f64 {
        let (cx, cy) = Self::key_of(q, self.cell);
        let gap = |c: i64, lo: i64, hi: i64| (lo - c).max(c - hi).max(0);
        let span = |c: i64, lo: i64, hi: i64| (c - lo).abs().max((hi - c).abs());
        let r0 = gap(cx, self.lo.0, self.hi.0).max(gap(cy, self.lo.1, self.hi.1));
        let r1 = span(cx, self.lo.0, self.hi.0).max(span(cy, self.lo.1, self.hi.1));
        let mut best = f64::INFINITY;
        let visit = |x: i64, y: i64, best: &mut f64| {
            if let Some(v) = self.buckets.get(&(x, y)) {
                for p in v {
                    *best = best.min((p - q).norm());
                }
            }
        };
        for r in r0..=r1 {
            // rings farther than the current best cannot improve it
            if (r as f64 - 1.0) * self.cell > best {
                break;
            }
            if r == 0 {
                visit(cx, cy, &mut best);
                continue;
            }
            let (xa, xb) = ((cx - r).max(self.lo.0), (cx + r).min(self.hi.0));
            let (ya, yb) = ((cy - r).max(self.lo.1), (cy + r).min(self.hi.1));
            for x in xa..=xb {
                visit(x, cy - r, &mut best);
                visit(x, cy + r, &mut best);
            }
            for y in ya.max(cy - r + 1)..=yb.min(cy + r - 1) {
                visit(cx - r, y, &mut best);
                visit(cx + r, y, &mut best);
            }
        }
        best
    }
}

/// `sup_{a ∈ A} inf_{b ∈ B} |a - b|` (Euclidean, on the given coordinates).
pub fn directed_hausdorff(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::param("Hausdorff distance of an empty set"));
    }
    let idx = PointIndex::new(b);
    Ok(a.iter().map(|&p| idx.nearest(p)).fold(0.0, f64::max))
}

fn to_metric_space(points: &[Complex64], metric: Metric) -> Result<Vec<Complex64>> {
    match metric {
        Metric::Euclidean => {
            if points.iter().any(|&z| is_infinite(z)) {
                return Err(Error::param("∞ needs the bounded metric"));
            }
            Ok(points.to_vec())
        }
        Metric::Bounded => points.iter().map(|&z| phi(z)).collect(),
    }
}

/// Hausdorff distance between finite point sets. In the bounded metric this
/// is the Euclidean distance of the `φ`-images, so `∞` is allowed.
pub fn hausdorff_distance(a: &[Complex64], b: &[Complex64], metric: Metric) -> Result<f64> {
    let a = to_metric_space(a, metric)?;
    let b = to_metric_space(b, metric)?;
    Ok(directed_hausdorff(&a, &b)?.max(directed_hausdorff(&b, &a)?))
}
