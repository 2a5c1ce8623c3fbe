use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fan::{ig_constants, sample_fan, FanConfig, FanSet, ImaginaryGeometryParams};
use crate::raster::{draw_polyline, BitGrid};
use crate::stats::{ks_two_sample, KsResult};
use crate::topology::{adjacency_graph_with, extract_components, is_connected};
use crate::trace::densify;

/// Statistics use the annulus `1/r < |z| < r`, which the inversion
/// `z ↦ -1/z` maps onto itself.
pub const ANNULUS_RADIUS: f64 = 1.9;

/// The grid spans `[-w, w] × [0, 2w]` in half-plane units around the marked
/// point. With `w = 2` the box walls nearly touch the annulus and bias the
/// mapped fans, whose outer ring lands next to the marked point.
pub const WINDOW_HALF_WIDTH: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanSummary {
    /// Fan pixels over annulus pixels.
    pub area_fraction: f64,
    /// Complement components inside the annulus with at least
    /// `MIN_COMPONENT` pixels.
    pub components: usize,
    /// Adjacency graph of those components (fan-pixel witnesses only).
    pub connected: bool,
}

/// Smallest component counted, in pixels, to ignore raster specks.
pub const MIN_COMPONENT: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReversalReport {
    pub mapped: Vec<FanSummary>,
    pub direct: Vec<FanSummary>,
    pub components_ks: KsResult,
    pub area_ks: KsResult,
    pub mapped_connectivity: f64,
    pub direct_connectivity: f64,
    /// Angle range of the directly simulated fans.
    pub mapped_range: (f64, f64),
}

struct Window {
    n: usize,
    origin: Complex64,
    scale: f64,
}

impl Window {
    fn new(n: usize) -> Self {
        Self {
            n,
            origin: Complex64::new((n / 2) as f64, 0.0),
            scale: n as f64 / (2.0 * WINDOW_HALF_WIDTH),
        }
    }

    fn to_h(&self, p: Complex64) -> Complex64 {
        (p - self.origin) / self.scale
    }

    fn to_px(&self, z: Complex64) -> Complex64 {
        z * self.scale + self.origin
    }

    fn in_annulus(&self, x: usize, y: usize) -> bool {
        let r = self.to_h(Complex64::new(x as f64, y as f64)).norm();
        r > 1.0 / ANNULUS_RADIUS && r < ANNULUS_RADIUS
    }
}

/// Raster of the fan pushed forward by `z ↦ -1/z`, drawn only where the
/// image lies near the annulus.
fn inverted_raster(fan: &FanSet, w: &Window) -> BitGrid {
    let mut g = BitGrid::new(w.n, w.n);
    let (lo, hi) = (0.8 / ANNULUS_RADIUS, 1.25 * ANNULUS_RADIUS);
    for (_, tr) in &fan.traces {
        let zs: Vec<Complex64> = tr.points.iter().map(|&p| w.to_h(p)).collect();
        // |dw| ≤ |dz|/|z|² ≤ 4|dz| on the padded annulus
        let dense = densify(&zs, 0.1 / w.scale);
        let mut run: Vec<Complex64> = Vec::new();
        for z in dense {
            let r = z.norm();
            if r > lo && r < hi {
                run.push(w.to_px(-1.0 / z));
            } else if !run.is_empty() {
                draw_polyline(&mut g, &run, 1);
                run.clear();
            }
        }
        if !run.is_empty() {
            draw_polyline(&mut g, &run, 1);
        }
    }
    g
}

fn summarize(raster: &BitGrid, w: &Window) -> FanSummary {
    let n = w.n;
    let mut barrier = raster.clone();
    let mut annulus = 0usize;
    let mut fan = 0usize;
    for y in 0..n {
        for x in 0..n {
            if w.in_annulus(x, y) {
                annulus += 1;
                if raster.get(x, y) {
                    fan += 1;
                }
            } else {
                barrier.set(x, y);
            }
        }
    }
    let cm = extract_components(&barrier);
    let sizes = cm.sizes();
    let components = sizes.iter().skip(1).filter(|&&s| s >= MIN_COMPONENT).count();
    let g = adjacency_graph_with(&cm, 1, 1, |x, y| raster.get(x, y) && w.in_annulus(x, y));
    FanSummary {
        area_fraction: fan as f64 / annulus as f64,
        components,
        connected: is_connected(&g).0,
    }
}

/// Angle range of the directly simulated fans matching `[θ₁, θ₂]`, and
/// their parameters (boundary data `(0, a+b)`).
pub fn mapped_setup(params: &ImaginaryGeometryParams, theta1: f64, theta2: f64) -> Result<(ImaginaryGeometryParams, (f64, f64))> {
    let swapped = ig_constants(params.kappa, 0.0, params.a + params.b)?;
    let shift = -params.b / params.chi;
    Ok((swapped, (shift - theta2, shift - theta1)))
}

/// One seed: a fan mapped by `z ↦ -1/z` and a directly simulated fan over
/// the mapped angles `θ̃ = -b/χ - θ`, both summarized on the annulus.
#[allow(clippy::too_many_arguments)]
pub fn reversal_pair<R: Rng + ?Sized>(
    params: &ImaginaryGeometryParams,
    theta1: f64,
    theta2: f64,
    n_angles: usize,
    resolution: usize,
    cfg: &FanConfig,
    rng: &mut R,
) -> Result<(FanSummary, FanSummary)> {
    let w = Window::new(resolution);
    let (swapped, range) = mapped_setup(params, theta1, theta2)?;
    let (_, fan) = sample_fan(params, resolution, resolution, theta1, theta2, n_angles, cfg, rng)?;
    let mapped = summarize(&inverted_raster(&fan, &w), &w);
    let (_, fan) = sample_fan(&swapped, resolution, resolution, range.0, range.1, n_angles, cfg, rng)?;
    let mut r = fan.raster.clone();
    // the direct fan is compared on the same annulus
    for y in 0..resolution {
        for x in 0..resolution {
            if !w.in_annulus(x, y) {
                r.bits[y * resolution + x] = false;
            }
        }
    }
    Ok((mapped, summarize(&r, &w)))
}

/// KS tests and connectivity rates over per-seed summaries.
pub fn reversal_report(mapped: Vec<FanSummary>, direct: Vec<FanSummary>, mapped_range: (f64, f64)) -> ReversalReport {
    let counts = |v: &[FanSummary]| v.iter().map(|s| s.components as f64).collect::<Vec<_>>();
    let areas = |v: &[FanSummary]| v.iter().map(|s| s.area_fraction).collect::<Vec<_>>();
    let rate = |v: &[FanSummary]| {
        if v.is_empty() {
            f64::NAN
        } else {
            v.iter().filter(|s| s.connected).count() as f64 / v.len() as f64
        }
    };
    ReversalReport {
        components_ks: ks_two_sample(&counts(&mapped), &counts(&direct)),
        area_ks: ks_two_sample(&areas(&mapped), &areas(&direct)),
        mapped_connectivity: rate(&mapped),
        direct_connectivity: rate(&direct),
        mapped,
        direct,
        mapped_range,
    }
}

/// [`reversal_pair`] over `n_seeds` draws from one stream.
#[allow(clippy::too_many_arguments)]
pub fn reversal_stats<R: Rng + ?Sized>(
    params: &ImaginaryGeometryParams,
    theta1: f64,
    theta2: f64,
    n_angles: usize,
    n_seeds: usize,
    resolution: usize,
    cfg: &FanConfig,
    rng: &mut R,
) -> Result<ReversalReport> {
    let (_, range) = mapped_setup(params, theta1, theta2)?;
    let mut mapped = Vec::with_capacity(n_seeds);
    let mut direct = Vec::with_capacity(n_seeds);
    for _ in 0..n_seeds {
        let (m, d) = reversal_pair(params, theta1, theta2, n_angles, resolution, cfg, rng)?;
        mapped.push(m);
        direct.push(d);
    }
    Ok(reversal_report(mapped, direct, range))
}
