//! Imaginary-geometry constants, admissible angles and the fan of flow
//! lines from one boundary point.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gff::{sample_dgff, smooth_field, trace_flow_line, BoundarySpec, LatticeField, TracerConfig, DEFAULT_SMOOTHING};
use crate::raster::{draw_polyline, BitGrid};
use crate::trace::{Termination, Trace, TraceMeta};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImaginaryGeometryParams {
    pub kappa: f64,
    pub lambda: f64,
    pub chi: f64,
    pub kappa_prime: f64,
    pub a: f64,
    pub b: f64,
}

/// `λ = π/√κ`, `χ = 2/√κ - √κ/2`, `κ' = 16/κ` for `κ ∈ (0, 4)`.
pub fn ig_constants(kappa: f64, a: f64, b: f64) -> Result<ImaginaryGeometryParams> {
    if !(kappa > 0.0 && kappa < 4.0) {
        return Err(Error::param(format!("κ must lie in (0, 4), got {kappa}")));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::param("boundary values must be finite"));
    }
    let s = kappa.sqrt();
    Ok(ImaginaryGeometryParams {
        kappa,
        lambda: PI / s,
        chi: 2.0 / s - s / 2.0,
        kappa_prime: 16.0 / kappa,
        a,
        b,
    })
}

impl ImaginaryGeometryParams {
    pub fn new(kappa: f64, a: f64, b: f64) -> Result<Self> {
        ig_constants(kappa, a, b)
    }

    /// Data `a = b = λ`, for which the angle-0 line is plain SLE_κ.
    pub fn symmetric(kappa: f64) -> Result<Self> {
        let lambda = PI / kappa.sqrt();
        ig_constants(kappa, lambda, lambda)
    }
}

/// `(θ_min, θ_max) = (-(λ+b)/χ, (a+λ)/χ)`; the endpoints stand for the
/// positive and negative real half-lines.
pub fn admissible_angle_range(p: &ImaginaryGeometryParams) -> Result<(f64, f64)> {
    if p.a + p.b <= -2.0 * p.lambda {
        return Err(Error::param(format!(
            "empty angle range: a + b = {} ≤ -2λ = {}",
            p.a + p.b,
            -2.0 * p.lambda
        )));
    }
    Ok((-(p.lambda + p.b) / p.chi, (p.a + p.lambda) / p.chi))
}

/// Force-point weights of the angle-θ flow line:
/// `ρ₁ = -1 + (a - θχ)/λ`, `ρ₂ = -1 + (b + θχ)/λ`.
pub fn rho_for_angle(p: &ImaginaryGeometryParams, theta: f64) -> Result<(f64, f64)> {
    let (lo, hi) = admissible_angle_range(p)?;
    let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    if !(theta >= lo - slack && theta <= hi + slack) {
        return Err(Error::param(format!("θ = {theta} outside the admissible range [{lo}, {hi}]")));
    }
    let rho1 = -1.0 + (p.a - theta * p.chi) / p.lambda;
    let rho2 = -1.0 + (p.b + theta * p.chi) / p.lambda;
    Ok((rho1.max(-2.0), rho2.max(-2.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanConfig {
    pub step: f64,
    pub max_len: f64,
    /// Gaussian smoothing radius applied once before tracing.
    pub smoothing: f64,
    /// Flow lines start this many pixels above the marked point.
    pub start_offset: f64,
    pub thickness: usize,
}

impl Default for FanConfig {
    fn default() -> Self {
        Self {
            step: 0.5,
            max_len: 1e5,
            smoothing: DEFAULT_SMOOTHING,
            start_offset: 2.0,
            thickness: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanSet {
    pub raster: BitGrid,
    /// Per-angle traces sorted by angle; each starts at the marked point.
    pub traces: Vec<(f64, Trace)>,
    pub params: ImaginaryGeometryParams,
    pub angle_grid: Vec<f64>,
    pub origin: Complex64,
    /// Raster pixels dropped outside the grid.
    pub clipped: usize,
}

impl FanSet {
    pub fn nx(&self) -> usize {
        self.raster.nx
    }

    pub fn ny(&self) -> usize {
        self.raster.ny
    }
}

/// Bresenham raster of a trace; returns the grid and the clipped count.
pub fn rasterize(trace: &Trace, nx: usize, ny: usize, thickness: usize) -> (BitGrid, usize) {
    let mut g = BitGrid::new(nx, ny);
    let clipped = draw_polyline(&mut g, &trace.points, thickness);
    (g, clipped)
}

/// `n` equally spaced angles from `theta1` to `theta2` inclusive.
pub fn angle_grid(theta1: f64, theta2: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                theta2
            } else {
                theta1 + (theta2 - theta1) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn boundary_segment(origin: Complex64, end: Complex64, theta: f64) -> Trace {
    Trace {
        points: vec![origin, end],
        times: vec![0.0, (end - origin).norm()],
        meta: TraceMeta {
            origin,
            angle: Some(theta),
            termination: Termination::BoundarySegment,
        },
    }
}

/// The fan: flow lines of every angle of a uniform grid in `[θ₁, θ₂]`,
/// all over the same smoothed `field`, from the marked point on the
/// bottom edge. An angle equal to `θ_min` (resp. `θ_max`) is the bottom
/// edge to the right (resp. left) of the marked point.
pub fn build_fan(
    field: &LatticeField,
    params: &ImaginaryGeometryParams,
    theta1: f64,
    theta2: f64,
    n_angles: usize,
    cfg: &FanConfig,
) -> Result<FanSet> {
    if n_angles < 2 {
        return Err(Error::param("a fan needs at least two angles"));
    }
    if !(theta1 < theta2) {
        return Err(Error::param(format!("need θ₁ < θ₂, got [{theta1}, {theta2}]")));
    }
    let (lo, hi) = admissible_angle_range(params)?;
    let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    if theta1 < lo - slack || theta2 > hi + slack {
        return Err(Error::param(format!(
            "[{theta1}, {theta2}] is not inside the admissible range [{lo}, {hi}]"
        )));
    }
    let (nx, ny) = (field.nx, field.ny);
    let smoothed = smooth_field(field, cfg.smoothing)?;
    let origin = Complex64::new(BoundarySpec::origin_column(nx) as f64, 0.0);
    let start = origin + Complex64::new(0.0, cfg.start_offset);
    let tcfg = TracerConfig::new(params.chi, cfg.step, cfg.max_len);

    let grid = angle_grid(theta1, theta2, n_angles);
    let mut traces = Vec::with_capacity(n_angles);
    for &theta in &grid {
        let tr = if (theta - lo).abs() <= slack {
            boundary_segment(origin, Complex64::new((nx - 1) as f64, 0.0), theta)
        } else if (theta - hi).abs() <= slack {
            boundary_segment(origin, Complex64::new(0.0, 0.0), theta)
        } else {
            let mut tr = trace_flow_line(&smoothed, start, theta, &tcfg).map_err(|e| Error::AtAngle {
                angle: theta,
                source: Box::new(e),
            })?;
            tr.points.insert(0, origin);
            let t0 = cfg.start_offset;
            for t in tr.times.iter_mut() {
                *t += t0;
            }
            tr.times.insert(0, 0.0);
            tr.meta.origin = origin;
            tr
        };
        traces.push((theta, tr));
    }
    let mut raster = BitGrid::new(nx, ny);
    let mut clipped = 0;
    for (_, tr) in &traces {
        clipped += draw_polyline(&mut raster, &tr.points, cfg.thickness);
    }
    Ok(FanSet {
        raster,
        traces,
        params: *params,
        angle_grid: grid,
        origin,
        clipped,
    })
}

/// Samples the field with fan boundary data `(-a, b)` on an `nx × ny` grid
/// and builds the fan over it.
#[allow(clippy::too_many_arguments)]
pub fn sample_fan<R: Rng + ?Sized>(
    params: &ImaginaryGeometryParams,
    nx: usize,
    ny: usize,
    theta1: f64,
    theta2: f64,
    n_angles: usize,
    cfg: &FanConfig,
    rng: &mut R,
) -> Result<(LatticeField, FanSet)> {
    let bd = BoundarySpec::fan(nx, ny, params.a, params.b, params.chi);
    let field = sample_dgff(nx, ny, &bd, rng)?;
    let fan = build_fan(&field, params, theta1, theta2, n_angles, cfg)?;
    Ok((field, fan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn constants() {
        let p = ig_constants(1.0, 0.0, 0.0).unwrap();
        assert!((p.lambda - PI).abs() < 1e-15);
        assert!((p.chi - 1.5).abs() < 1e-15);
        assert_eq!(p.kappa_prime, 16.0);
        let p = ig_constants(2.0, 0.0, 0.0).unwrap();
        assert!((p.chi - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.kappa_prime, 8.0);
        let p = ig_constants(4.0 - 1e-9, 0.0, 0.0).unwrap();
        assert!(p.chi > 0.0 && p.chi < 1e-9);
        assert!(ig_constants(4.0, 0.0, 0.0).is_err());
        assert!(ig_constants(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn ranges() {
        let p = ImaginaryGeometryParams::symmetric(2.0).unwrap();
        let (lo, hi) = admissible_angle_range(&p).unwrap();
        assert!((lo + 2.0 * PI).abs() < 1e-12 && (hi - 2.0 * PI).abs() < 1e-12);
        let p = ig_constants(2.0, 0.0, 0.0).unwrap();
        let (lo, hi) = admissible_angle_range(&p).unwrap();
        assert!((lo + PI).abs() < 1e-12 && (hi - PI).abs() < 1e-12);
        let bad = ig_constants(2.0, -p.lambda, -p.lambda).unwrap();
        assert!(admissible_angle_range(&bad).is_err());
    }

    #[test]
    fn rho_dictionary() {
        let p = ImaginaryGeometryParams::symmetric(2.0).unwrap();
        assert!(rho_for_angle(&p, 0.0).unwrap().0.abs() < 1e-15);
        let (lo, hi) = admissible_angle_range(&p).unwrap();
        assert_eq!(rho_for_angle(&p, lo).unwrap().1, -2.0);
        assert_eq!(rho_for_angle(&p, hi).unwrap().0, -2.0);
        assert!(rho_for_angle(&p, hi + 1e-6).is_err());
    }

    #[test]
    fn fan_raster_is_union_of_traces() {
        let (nx, ny) = (64, 64);
        let p = ig_constants(1.0, 0.0, 0.0).unwrap();
        let bd = BoundarySpec::fan(nx, ny, p.a, p.b, p.chi);
        let mut rng = stream(3, "fan", 0, "field");
        let f = sample_dgff(nx, ny, &bd, &mut rng).unwrap();
        let fan = build_fan(&f, &p, -0.8, 0.8, 5, &FanConfig::default()).unwrap();
        let mut u = BitGrid::new(nx, ny);
        for (_, tr) in &fan.traces {
            u.union_with(&rasterize(tr, nx, ny, 1).0);
            assert_eq!(tr.points[0], fan.origin);
        }
        assert_eq!(u, fan.raster);
        assert_eq!(fan.angle_grid.len(), 5);
    }

    #[test]
    fn endpoint_angles_are_boundary_segments() {
        let (nx, ny) = (32, 32);
        let p = ig_constants(1.0, 0.0, 0.0).unwrap();
        let (lo, hi) = admissible_angle_range(&p).unwrap();
        let f = crate::gff::harmonic_extension(nx, ny, &BoundarySpec::constant(nx, ny, 0.0)).unwrap();
        let fan = build_fan(&f, &p, lo, hi, 3, &FanConfig::default()).unwrap();
        assert_eq!(fan.traces[0].1.meta.termination, Termination::BoundarySegment);
        assert_eq!(fan.traces[0].1.last(), Complex64::new(31.0, 0.0));
        assert_eq!(fan.traces[2].1.last(), Complex64::new(0.0, 0.0));
        for x in 0..nx {
            assert!(fan.raster.get(x, 0));
        }
    }

    #[test]
    fn rasterize_segment_counts() {
        let tr = boundary_segment(Complex64::new(0.0, 0.0), Complex64::new(10.0, 0.0), 0.0);
        let (g, clipped) = rasterize(&tr, 20, 5, 1);
        assert_eq!(g.count(), 11);
        assert_eq!(clipped, 0);
        let mut h = g.clone();
        h.union_with(&g);
        assert_eq!(h, g);
    }
}
