use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    /// Box sizes, strictly decreasing.
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    /// Least-squares slope of `log N(s)` against `log(1/s)` over the
    /// scales other than the largest and the smallest.
    pub slope: f64,
    pub r2: f64,
}

/// `n` scales `s_max, s_max/2, …` halving each time.
pub fn dyadic_scales(s_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| s_max / (1u64 << k) as f64).collect()
}

/// Least-squares line `y = a + b x`; returns `(b, r²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, r2)
}

/// Box-counting dimension of a point cloud. Boxes are anchored at the
/// lower-left corner of the bounding box; points should be spaced well
/// below the smallest scale.
pub fn box_dimension(points: &[Complex64], scales: &[f64]) -> Result<DimensionReport> {
    if points.is_empty() {
        return Err(Error::param("box counting needs points"));
    }
    let mut scales: Vec<f64> = scales.to_vec();
    scales.sort_by(|a, b| b.total_cmp(a));
    scales.dedup();
    if scales.len() < 4 || scales.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::param("need at least 4 distinct positive scales"));
    }
    if scales[0] / scales[scales.len() - 1] < 4.0 {
        return Err(Error::param("scales must span at least two octaves"));
    }
    let x0 = points.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
    let y0 = points.iter().map(|p| p.im).fold(f64::INFINITY, f64::min);
    let counts: Vec<usize> = scales
        .iter()
        .map(|&s| {
            points
                .iter()
                .map(|p| (((p.re - x0) / s).floor() as i64, ((p.im - y0) / s).floor() as i64))
                .collect::<HashSet<_>>()
                .len()
        })
        .collect();
    let inner = 1..scales.len() - 1;
    let lx: Vec<f64> = scales[inner.clone()].iter().map(|s| -s.ln()).collect();
    let ly: Vec<f64> = counts[inner].iter().map(|&c| (c as f64).ln()).collect();
    let (slope, r2) = linear_fit(&lx, &ly);
    Ok(DimensionReport { scales, counts, slope, r2 })
}

/// `θ_c = πκ/(4-κ)`, the largest angle gap at which flow lines still meet.
pub fn critical_angle(kappa: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa < 4.0) {
        return Err(Error::param(format!("κ must lie in (0, 4), got {kappa}")));
    }
    Ok(PI * kappa / (4.0 - kappa))
}

/// Dimension of the intersection of two flow lines with angle gap `Δθ`:
/// `2 - (ρ + κ/2 + 2)(ρ - κ/2 + 6)/(2κ)` with `ρ = Δθ(2 - κ/2)/π - 2`.
pub fn intersection_dimension(kappa: f64, delta_theta: f64) -> Result<f64> {
    let tc = critical_angle(kappa)?;
    if !(delta_theta >= 0.0 && delta_theta <= tc) {
        return Err(Error::param(format!("Δθ = {delta_theta} outside [0, {tc}]")));
    }
    let rho = delta_theta * (2.0 - kappa / 2.0) / PI - 2.0;
    Ok(2.0 - (rho + kappa / 2.0 + 2.0) * (rho - kappa / 2.0 + 6.0) / (2.0 * kappa))
}

/// Dimension of a flow line's intersection with the boundary:
/// `1 - (ρ + 2)(ρ + 4 - κ/2)/κ` for `ρ ∈ [-2, κ/2 - 2]`, exactly 1 and 0
/// at the ends.
pub fn boundary_dimension(kappa: f64, rho: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa < 4.0) {
        return Err(Error::param(format!("κ must lie in (0, 4), got {kappa}")));
    }
    let hi = kappa / 2.0 - 2.0;
    if !(rho >= -2.0 && rho <= hi) {
        return Err(Error::param(format!("ρ = {rho} outside [-2, {hi}]")));
    }
    // ρ + 2 does not round back to κ/2 at the upper end
    if rho == hi {
        return Ok(0.0);
    }
    Ok(1.0 - (rho + 2.0) * (rho + 4.0 - kappa / 2.0) / kappa)
}

/// Vertices of the Koch curve on `[0, 1]` after `level` refinements.
pub fn koch_curve(level: u32) -> Vec<Complex64> {
    let mut pts = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    let rot = Complex64::from_polar(1.0, PI / 3.0);
    for _ in 0..level {
        let mut next = Vec::with_capacity(4 * pts.len());
        for w in pts.windows(2) {
            let d = (w[1] - w[0]) / 3.0;
            let a = w[0] + d;
            next.extend_from_slice(&[w[0], a, a + d * rot, a + d]);
        }
        next.push(*pts.last().unwrap());
        pts = next;
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::densify;

    #[test]
    fn segment_and_square() {
        let line = densify(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.3)], 1e-4);
        let r = box_dimension(&line, &dyadic_scales(0.25, 8)).unwrap();
        assert!((r.slope - 1.0).abs() < 0.05, "{r:?}");
        let mut sq = Vec::new();
        for i in 0..300 {
            for j in 0..300 {
                sq.push(Complex64::new(i as f64, j as f64) / 300.0);
            }
        }
        let r = box_dimension(&sq, &dyadic_scales(0.25, 6)).unwrap();
        assert!((r.slope - 2.0).abs() < 0.05, "{r:?}");
        assert!(r.counts.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn koch_calibration() {
        let k = densify(&koch_curve(8), 1e-4);
        let r = box_dimension(&k, &dyadic_scales(0.125, 9)).unwrap();
        assert!((r.slope - 4f64.ln() / 3f64.ln()).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn degenerate_scales_rejected() {
        let p = vec![Complex64::new(0.0, 0.0); 10];
        assert!(box_dimension(&p, &[1.0, 0.9, 0.8, 0.7]).is_err());
        assert!(box_dimension(&p, &[1.0, 0.5, 0.25]).is_err());
    }

    #[test]
    fn formula_endpoints() {
        for kappa in [0.5, 1.0, 2.0, 3.0] {
            let tc = critical_angle(kappa).unwrap();
            assert!((intersection_dimension(kappa, 0.0).unwrap() - (1.0 + kappa / 8.0)).abs() < 1e-12);
            assert!(intersection_dimension(kappa, tc).unwrap().abs() < 1e-12);
            assert_eq!(boundary_dimension(kappa, -2.0).unwrap(), 1.0);
            assert!(boundary_dimension(kappa, kappa / 2.0 - 2.0).unwrap().abs() < 1e-15);
        }
        assert!((critical_angle(2.0).unwrap() - PI).abs() < 1e-15);
        assert!((critical_angle(4.0 / 3.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((intersection_dimension(2.0, PI / 2.0).unwrap() - 0.6875).abs() < 1e-15);
        assert!((boundary_dimension(3.0, -1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(intersection_dimension(2.0, -0.1).is_err());
        assert!(boundary_dimension(2.0, -2.1).is_err());
        assert!(critical_angle(4.0).is_err());
    }
}
