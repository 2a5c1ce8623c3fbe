//! Curve polylines shared by the Loewner and flow-line code.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Why a curve stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Ran for the full requested time or length.
    Complete,
    /// Left the simulation window; the last segment is clipped to its edge.
    Boundary,
    /// Reached the maximal arc length.
    MaxLength,
    /// Revisited its own neighbourhood heading backwards.
    SelfTrap,
    /// Driving process hit the continuation threshold.
    Threshold,
    /// Not traced: an endpoint angle realised as a boundary segment.
    BoundarySegment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub origin: Complex64,
    pub angle: Option<f64>,
    pub termination: Termination,
}

/// Ordered polyline. Loewner traces use half-plane coordinates; flow lines
/// use pixel coordinates `x + iy` with `y = 0` the bottom row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub points: Vec<Complex64>,
    /// Capacity time for Loewner traces, arc length for flow lines.
    pub times: Vec<f64>,
    pub meta: TraceMeta,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Complex64 {
        *self.points.last().expect("traces are never empty")
    }

    /// Total polyline length.
    pub fn arc_length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Vertices with extra points inserted so consecutive spacing is at
    /// most `max_spacing`.
    pub fn densified(&self, max_spacing: f64) -> Vec<Complex64> {
        densify(&self.points, max_spacing)
    }
}

pub fn densify(points: &[Complex64], max_spacing: f64) -> Vec<Complex64> {
    assert!(max_spacing > 0.0);
    let mut out = Vec::with_capacity(points.len());
    if let Some(&first) = points.first() {
        out.push(first);
    }
    for w in points.windows(2) {
        let d = (w[1] - w[0]).norm();
        let pieces = (d / max_spacing).ceil().max(1.0) as usize;
        for k in 1..pieces {
            out.push(w[0] + (w[1] - w[0]) * (k as f64 / pieces as f64));
        }
        out.push(w[1]);
    }
    out
}

/// Number of proper crossings between segments `i` and `j` of a polyline
/// with `j - i >= min_gap` (`min_gap >= 2` excludes only adjacent segments).
pub fn count_self_crossings(points: &[Complex64], min_gap: usize) -> usize {
    let min_gap = min_gap.max(2);
    let n = points.len();
    if n < 4 {
        return 0;
    }
    // bucket segments by the grid cells their bounding boxes touch
    let mean_len = points.windows(2).map(|w| (w[1] - w[0]).norm()).sum::<f64>() / (n - 1) as f64;
    let cell = mean_len.max(1e-12);
    let key = |z: Complex64| ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64);
    let mut buckets: std::collections::HashMap<(i64, i64), Vec<usize>> = std::collections::HashMap::new();
    for i in 0..n - 1 {
        let (a, b) = (key(points[i]), key(points[i + 1]));
        for cx in a.0.min(b.0)..=a.0.max(b.0) {
            for cy in a.1.min(b.1)..=a.1.max(b.1) {
                buckets.entry((cx, cy)).or_default().push(i);
            }
        }
    }
    let mut pairs = std::collections::HashSet::new();
    for segs in buckets.values() {
        for (x, &i) in segs.iter().enumerate() {
            for &j in &segs[x + 1..] {
                let (i, j) = (i.min(j), i.max(j));
                if j >= i + min_gap && segments_cross(points[i], points[i + 1], points[j], points[j + 1]) {
                    pairs.insert((i, j));
                }
            }
        }
    }
    pairs.len()
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    (b - a).re * (c - a).im - (b - a).im * (c - a).re
}

/// Proper (transversal) crossing of segments `pq` and `rs`.
pub fn segments_cross(p: Complex64, q: Complex64, r: Complex64, s: Complex64) -> bool {
    let d1 = orient(p, q, r);
    let d2 = orient(p, q, s);
    let d3 = orient(r, s, p);
    let d4 = orient(r, s, q);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}
