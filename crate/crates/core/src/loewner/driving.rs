use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bessel::{delta_from_rho, sample_besq_on_grid, uniform_grid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

/// Marked boundary point of an SLE_κ(ρ) process. A location of 0 together
/// with the side encodes 0⁻ or 0⁺.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForcePoint {
    pub side: Side,
    pub location: f64,
    pub rho: f64,
}

impl ForcePoint {
    pub fn left(location: f64, rho: f64) -> Self {
        Self {
            side: Side::Left,
            location,
            rho,
        }
    }

    pub fn right(location: f64, rho: f64) -> Self {
        Self {
            side: Side::Right,
            location,
            rho,
        }
    }
}

/// Driving function and force-point tracks on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrivingPath {
    pub times: Vec<f64>,
    pub w: Vec<f64>,
    /// One track per force point, in the order the points were given.
    pub v: Vec<Vec<f64>>,
    pub force_points: Vec<ForcePoint>,
    /// First grid time at which the continuation threshold was hit; the
    /// arrays end there.
    pub threshold_time: Option<f64>,
    /// Steps on which the Bessel-built integral of `1/X` hit the floor.
    pub floored_steps: usize,
}

impl DrivingPath {
    /// Path with given driving samples and no force points.
    pub fn from_samples(times: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != w.len() {
            return Err(Error::param("times and driving values must be nonempty and of equal length"));
        }
        Ok(Self {
            times,
            w,
            v: Vec::new(),
            force_points: Vec::new(),
            threshold_time: None,
            floored_steps: 0,
        })
    }

    /// Constant driving `W ≡ w0` on `[0, t_end]`.
    pub fn constant(w0: f64, t_end: f64, dt: f64) -> Result<Self> {
        let times = uniform_grid(t_end, dt)?;
        let w = vec![w0; times.len()];
        Self::from_samples(times, w)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Grid step (0 for a single-point path).
    pub fn dt(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }
}

fn validate_force_points(points: &[ForcePoint]) -> Result<()> {
    for p in points {
        if !p.rho.is_finite() || !p.location.is_finite() {
            return Err(Error::param("force point weights and locations must be finite"));
        }
        match p.side {
            Side::Left if p.location > 0.0 => {
                return Err(Error::param(format!("left force point at {} > 0", p.location)))
            }
            Side::Right if p.location < 0.0 => {
                return Err(Error::param(format!("right force point at {} < 0", p.location)))
            }
            _ => {}
        }
    }
    for side in [Side::Left, Side::Right] {
        let mut locs: Vec<f64> = points.iter().filter(|p| p.side == side).map(|p| p.location).collect();
        locs.sort_by(f64::total_cmp);
        if locs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("force points on one side must have distinct locations"));
        }
    }
    Ok(())
}

/// Indices per side, nearest to the origin first.
fn side_orders(points: &[ForcePoint]) -> [Vec<usize>; 2] {
    let mut left: Vec<usize> = (0..points.len()).filter(|&i| points[i].side == Side::Left).collect();
    let mut right: Vec<usize> = (0..points.len()).filter(|&i| points[i].side == Side::Right).collect();
    left.sort_by(|&a, &b| points[b].location.total_cmp(&points[a].location));
    right.sort_by(|&a, &b| points[a].location.total_cmp(&points[b].location));
    [left, right]
}

/// Restores `V^L ≤ W ≤ V^R` (and monotone order within a side) by placing
/// offending points just beside their inner neighbour.
fn repair_order(w: f64, v: &mut [f64], orders: &[Vec<usize>; 2], points: &[ForcePoint], gap: f64) {
    for order in orders {
        let mut inner = w;
        let mut first = true;
        for &i in order {
            let s = points[i].side.sign();
            if first {
                if s * (v[i] - w) < 0.0 {
                    v[i] = w + s * gap;
                }
                first = false;
            } else if s * (v[i] - inner) < 0.0 {
                v[i] = inner;
            }
            inner = v[i];
        }
    }
}

fn threshold_hit(w: f64, v: &[f64], points: &[ForcePoint], tol: f64) -> bool {
    [Side::Left, Side::Right].iter().any(|&side| {
        let mut collided = false;
        let mut sum = 0.0;
        for (p, &vi) in points.iter().zip(v) {
            if p.side == side && (vi - w).abs() <= tol {
                collided = true;
                sum += p.rho;
            }
        }
        collided && sum <= -2.0
    })
}

/// SLE_κ(ρ) driving process with the given force points.
///
/// Each step adds the Brownian increment `√κ ΔB` to `W`, repairs the
/// ordering (bounce rule: a crossed point is put at `W ± 10⁻¹² √dt`), then
/// applies for every force point the exact flow of the pair
/// `dW = ρ/(W-V) dt, dV = 2/(V-W) dt`, along which `(V-W)²` grows linearly
/// at rate `2(2+ρ)`. This is Euler–Maruyama on the noise with the singular
/// drift integrated in closed form, so a point started at 0± separates
/// correctly from the first step.
pub fn drive_sle<R: Rng + ?Sized>(
    kappa: f64,
    force_points: &[ForcePoint],
    t_end: f64,
    dt: f64,
    rng: &mut R,
) -> Result<DrivingPath> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::param(format!("κ must be positive, got {kappa}")));
    }
    validate_force_points(force_points)?;
    let grid = uniform_grid(t_end, dt)?;
    let h = grid[1] - grid[0];
    let gap = 1e-12 * h.sqrt();
    let tol = 10.0 * gap;
    let orders = side_orders(force_points);
    let sqrt_kappa = kappa.sqrt();
    let sqrt_h = h.sqrt();

    let k = force_points.len();
    let mut w = 0.0;
    let mut v: Vec<f64> = force_points.iter().map(|p| p.location).collect();
    let mut times = Vec::with_capacity(grid.len());
    let mut w_track = Vec::with_capacity(grid.len());
    let mut v_tracks: Vec<Vec<f64>> = (0..k).map(|_| Vec::with_capacity(grid.len())).collect();
    let record = |w: f64, v: &[f64], t: f64, times: &mut Vec<f64>, wt: &mut Vec<f64>, vt: &mut [Vec<f64>]| {
        times.push(t);
        wt.push(w);
        for (track, &vi) in vt.iter_mut().zip(v) {
            track.push(vi);
        }
    };
    record(w, &v, 0.0, &mut times, &mut w_track, &mut v_tracks);
    let mut threshold_time = threshold_hit(w, &v, force_points, tol).then_some(0.0);

    if threshold_time.is_none() {
        for (step, &t) in grid.iter().enumerate().skip(1) {
            let z: f64 = rng.sample(StandardNormal);
            w += sqrt_kappa * sqrt_h * z;
            repair_order(w, &mut v, &orders, force_points, gap);
            for order in &orders {
                for &i in order {
                    let p = &force_points[i];
                    let s = p.side.sign();
                    // an earlier update may have pushed W past this point,
                    // which then travels with W
                    if s * (v[i] - w) < 0.0 {
                        v[i] = w;
                    }
                    let d = v[i] - w;
                    let c = 2.0 + p.rho;
                    if c == 0.0 {
                        if d.abs() > tol {
                            let shift = 2.0 * h / d;
                            w += shift;
                            v[i] += shift;
                        }
                        continue;
                    }
                    let sq = d * d + 2.0 * c * h;
                    let d_new = if sq <= 0.0 { 0.0 } else { s * sq.sqrt() };
                    let delta_d = d_new - d;
                    w += -p.rho * delta_d / c;
                    v[i] = w + d_new;
                }
            }
            repair_order(w, &mut v, &orders, force_points, gap);
            if !w.is_finite() || v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Numeric {
                    step,
                    message: "driving process became non-finite".into(),
                });
            }
            record(w, &v, t, &mut times, &mut w_track, &mut v_tracks);
            if threshold_hit(w, &v, force_points, tol) {
                threshold_time = Some(t);
                break;
            }
        }
    }
    Ok(DrivingPath {
        times,
        w: w_track,
        v: v_tracks,
        force_points: force_points.to_vec(),
        threshold_time,
        floored_steps: 0,
    })
}

/// SLE_κ(ρ) driving process with one force point at 0⁺ built from a Bessel
/// process: `X` is BES^δ from 0 with `δ = 1 + 2(ρ+2)/κ`,
/// `V_t = (2/√κ) ∫₀ᵗ ds/X_s` and `W = V - √κ X`.
///
/// The integral over a step is `2h/(X_a + X_b)`, exact when `X²` is linear
/// on the step; the denominator is floored at `2·10⁻⁶ √dt` and floored
/// steps are counted in `floored_steps`.
pub fn drive_sle_rho_bessel<R: Rng + ?Sized>(
    kappa: f64,
    rho: f64,
    t_end: f64,
    dt: f64,
    rng: &mut R,
) -> Result<DrivingPath> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::param(format!("κ must be positive, got {kappa}")));
    }
    if !(rho > -2.0) {
        return Err(Error::param(format!("Bessel-built driving needs ρ > -2, got {rho}")));
    }
    let times = uniform_grid(t_end, dt)?;
    let h = times[1] - times[0];
    let x_floor = 1e-6 * h.sqrt();
    let delta = delta_from_rho(rho, kappa);
    let x: Vec<f64> = sample_besq_on_grid(delta, 0.0, &times, rng)
        .into_iter()
        .map(f64::sqrt)
        .collect();
    let sqrt_kappa = kappa.sqrt();
    let mut v = Vec::with_capacity(times.len());
    let mut floored = 0usize;
    let mut acc = 0.0;
    v.push(0.0);
    for k in 1..times.len() {
        let step = times[k] - times[k - 1];
        let mut denom = x[k - 1] + x[k];
        if denom < 2.0 * x_floor {
            denom = 2.0 * x_floor;
            floored += 1;
        }
        acc += (2.0 / sqrt_kappa) * 2.0 * step / denom;
        v.push(acc);
    }
    let w = v.iter().zip(&x).map(|(vi, xi)| vi - sqrt_kappa * xi).collect();
    Ok(DrivingPath {
        times,
        w,
        v: vec![v],
        force_points: vec![ForcePoint::right(0.0, rho)],
        threshold_time: None,
        floored_steps: floored,
    })
}
