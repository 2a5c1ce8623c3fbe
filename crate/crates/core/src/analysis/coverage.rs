use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::metric::{phi, PointIndex};
use crate::error::{Error, Result};
use crate::fan::{rho_for_angle, ImaginaryGeometryParams};
use crate::loewner::{drive_sle, loewner_slit_curve, ForcePoint};
use crate::stats::{median, proportion, MeanSe};
use crate::trace::{densify, Trace};

/// Loewner curve of SLE_κ(ρ₁; ρ₂) with force points at `0⁻` and `0⁺`,
/// slit bases included so runs along ℝ₊ within a step are kept.
pub fn sample_sle_kappa_rho<R: Rng + ?Sized>(
    kappa: f64,
    rho1: f64,
    rho2: f64,
    t_end: f64,
    dt: f64,
    rng: &mut R,
) -> Result<Trace> {
    let fp = [ForcePoint::left(0.0, rho1), ForcePoint::right(0.0, rho2)];
    let path = drive_sle(kappa, &fp, t_end, dt, rng)?;
    loewner_slit_curve(&path)
}

/// Whether every point of a grid on `[0, r]` (spacing `δ₀/2`) is within
/// `δ₀` of the trace.
pub fn covers_segment(points: &[Complex64], r: f64, delta0: f64) -> bool {
    if points.is_empty() {
        return false;
    }
    let dense = densify(points, delta0 / 4.0);
    let idx = PointIndex::new(&dense);
    let n = (2.0 * r / delta0).ceil() as usize;
    (0..=n).all(|k| idx.nearest(Complex64::new(r * k as f64 / n as f64, 0.0)) <= delta0)
}

/// Bounded-metric Hausdorff distance between a trace (closed up with `∞`)
/// and `[0, ∞]`. The half-line maps under `φ` to the lower unit half-circle.
pub fn hausdorff_to_positive_axis(points: &[Complex64]) -> Result<f64> {
    let mut a: Vec<Complex64> = points.iter().map(|&z| phi(z)).collect::<Result<_>>()?;
    a.push(Complex64::new(1.0, 0.0));
    let a = densify(&a, 1e-3);
    let arc: Vec<Complex64> = (0..=4000).map(|k| Complex64::from_polar(1.0, -PI + PI * k as f64 / 4000.0)).collect();
    let ia = PointIndex::new(&a);
    let ib = PointIndex::new(&arc);
    let d1 = a.iter().map(|&p| ib.nearest(p)).fold(0.0, f64::max);
    let d2 = arc.iter().map(|&p| ia.nearest(p)).fold(0.0, f64::max);
    Ok(d1.max(d2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageLevel {
    pub theta: f64,
    pub rho1: f64,
    pub rho2: f64,
    /// Fraction of runs covering `[0, R]` within `δ₀`.
    pub coverage: MeanSe,
    /// Per-run bounded Hausdorff distance to `[0, ∞]`.
    pub hausdorff: Vec<f64>,
    pub hausdorff_median: f64,
}

/// One run: whether the trace covers `[0, R]` within `δ₀`, and its bounded
/// Hausdorff distance to the positive half-line.
#[allow(clippy::too_many_arguments)]
pub fn coverage_run<R: Rng + ?Sized>(
    kappa: f64,
    rho1: f64,
    rho2: f64,
    r: f64,
    delta0: f64,
    t_end: f64,
    dt: f64,
    rng: &mut R,
) -> Result<(bool, f64)> {
    if !(r > 0.0 && delta0 > 0.0) {
        return Err(Error::param("R and δ₀ must be positive"));
    }
    let tr = sample_sle_kappa_rho(kappa, rho1, rho2, t_end, dt, rng)?;
    Ok((covers_segment(&tr.points, r, delta0), hausdorff_to_positive_axis(&tr.points)?))
}

/// Summary of the runs at one angle.
pub fn coverage_level(theta: f64, rho1: f64, rho2: f64, runs: &[(bool, f64)]) -> CoverageLevel {
    let hd: Vec<f64> = runs.iter().map(|r| r.1).collect();
    CoverageLevel {
        theta,
        rho1,
        rho2,
        coverage: proportion(runs.iter().filter(|r| r.0).count(), runs.len()),
        hausdorff_median: median(&hd),
        hausdorff: hd,
    }
}

/// For each angle, `n` SLE_κ(ρ₁; ρ₂) traces with the angle's force-point
/// weights: how often they come within `δ₀` of all of `[0, R]`, and how
/// far they are from the positive half-line in the bounded metric.
#[allow(clippy::too_many_arguments)]
pub fn coverage_stats<R: Rng + ?Sized>(
    params: &ImaginaryGeometryParams,
    thetas: &[f64],
    r: f64,
    delta0: f64,
    n: usize,
    t_end: f64,
    dt: f64,
    rng: &mut R,
) -> Result<Vec<CoverageLevel>> {
    let mut out = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let (rho1, rho2) = rho_for_angle(params, theta)?;
        let runs = (0..n)
            .map(|_| coverage_run(params.kappa, rho1, rho2, r, delta0, t_end, dt, rng))
            .collect::<Result<Vec<_>>>()?;
        out.push(coverage_level(theta, rho1, rho2, &runs));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_trace_covers() {
        let seg = vec![Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0)];
        assert!(covers_segment(&seg, 2.0, 0.05));
        let short = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(!covers_segment(&short, 2.0, 0.05));
        assert!(covers_segment(&short, 2.0, 1.1));
    }

    #[test]
    fn positive_axis_is_at_distance_zero() {
        let axis: Vec<Complex64> = (0..2000).map(|k| Complex64::new((k as f64 * 0.01).exp() - 1.0, 0.0)).collect();
        assert!(hausdorff_to_positive_axis(&axis).unwrap() < 0.01);
        let up = vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)];
        // φ(i) = 0 is at distance 1 from the unit circle
        assert!((hausdorff_to_positive_axis(&up).unwrap() - 1.0).abs() < 1e-3);
    }
}
