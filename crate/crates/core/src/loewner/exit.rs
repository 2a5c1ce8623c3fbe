use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::driving::{drive_sle, ForcePoint};
use super::zipper::TraceCursor;
use crate::error::{Error, Result};

/// Side of `R_ε = [-ε^{1/2}, 1/ε] × [0, ε]` through which a trace leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitSide {
    Left,
    Top,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitSideStats {
    pub left: f64,
    pub top: f64,
    pub right: f64,
    pub left_count: usize,
    pub top_count: usize,
    pub right_count: usize,
    /// Runs whose trace stayed inside the rectangle up to the time horizon.
    pub unclassified: usize,
}

impl ExitSideStats {
    pub fn classified(&self) -> usize {
        self.left_count + self.top_count + self.right_count
    }
}

/// Side through which the segment `p → q` leaves the rectangle, if it does.
pub fn exit_through(p: Complex64, q: Complex64, epsilon: f64) -> Option<ExitSide> {
    let (xl, xr, yt) = (-epsilon.sqrt(), 1.0 / epsilon, epsilon);
    let inside = |z: Complex64| z.re >= xl && z.re <= xr && z.im <= yt;
    if inside(q) {
        return None;
    }
    let d = q - p;
    let mut best = (f64::INFINITY, ExitSide::Top);
    if q.im > yt && d.im > 0.0 {
        best = best.min_by_param((yt - p.im) / d.im, ExitSide::Top);
    }
    if q.re > xr && d.re > 0.0 {
        best = best.min_by_param((xr - p.re) / d.re, ExitSide::Right);
    }
    if q.re < xl && d.re < 0.0 {
        best = best.min_by_param((xl - p.re) / d.re, ExitSide::Left);
    }
    Some(best.1)
}

trait MinByParam {
    fn min_by_param(self, s: f64, side: ExitSide) -> Self;
}

impl MinByParam for (f64, ExitSide) {
    fn min_by_param(self, s: f64, side: ExitSide) -> Self {
        if s < self.0 {
            (s, side)
        } else {
            self
        }
    }
}

/// First exit side of one SLE_κ(ρ) trace (force point at 0⁺), or `None`
/// if it has not left by `t_max`.
///
/// Uses the split-step driver: near `ρ = -2` the force point is pushed away
/// by time spent at sub-step scales, which the closed-form drift step
/// keeps and a trapezoid integral of the Bessel path loses.
pub fn sample_exit_side<R: Rng + ?Sized>(
    kappa: f64,
    rho: f64,
    epsilon: f64,
    dt: f64,
    t_max: f64,
    rng: &mut R,
) -> Result<Option<ExitSide>> {
    let path = drive_sle(kappa, &[ForcePoint::right(0.0, rho)], t_max, dt, rng)?;
    let mut prev: Option<Complex64> = None;
    for item in TraceCursor::new(&path) {
        let (_, z) = item?;
        if let Some(p) = prev {
            if let Some(side) = exit_through(p, z, epsilon) {
                return Ok(Some(side));
            }
        }
        prev = Some(z);
    }
    Ok(None)
}

/// Empirical exit-side frequencies of `R_ε` over `n` traces.
pub fn exit_side_stats<R: Rng + ?Sized>(
    kappa: f64,
    rho: f64,
    epsilon: f64,
    n: usize,
    dt: f64,
    t_max: f64,
    rng: &mut R,
) -> Result<ExitSideStats> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param(format!("ε must lie in (0, 1), got {epsilon}")));
    }
    if n == 0 {
        return Err(Error::param("need at least one run"));
    }
    let mut counts = [0usize; 3];
    let mut unclassified = 0;
    for _ in 0..n {
        match sample_exit_side(kappa, rho, epsilon, dt, t_max, rng)? {
            Some(ExitSide::Left) => counts[0] += 1,
            Some(ExitSide::Top) => counts[1] += 1,
            Some(ExitSide::Right) => counts[2] += 1,
            None => unclassified += 1,
        }
    }
    let total = (counts[0] + counts[1] + counts[2]) as f64;
    let freq = |c: usize| if total > 0.0 { c as f64 / total } else { f64::NAN };
    Ok(ExitSideStats {
        left: freq(counts[0]),
        top: freq(counts[1]),
        right: freq(counts[2]),
        left_count: counts[0],
        top_count: counts[1],
        right_count: counts[2],
        unclassified,
    })
}
