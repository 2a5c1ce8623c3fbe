use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::driving::DrivingPath;
use crate::error::{Error, Result};

/// Substeps used when a point is within `10√dt` of the driving value.
const NEAR_SUBSTEPS: usize = 16;

/// Trajectory of `g_t(z)` and `g_t'(z)` up to the swallowing time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFlow {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub derivatives: Vec<Complex64>,
    pub swallow_time: Option<f64>,
}

/// One step of the Loewner flow with the driving value frozen at `w`:
/// `(g - w)² + 4h` is the exact solution for constant driving. Returns the
/// new value and the factor multiplying `g'`.
#[inline]
pub(crate) fn slit_step(g: Complex64, w: f64, h: f64) -> (Complex64, Complex64) {
    let u = g - w;
    let mut r = (u * u + 4.0 * h).sqrt();
    // the root continuous in h is the one pointing the same way as u
    if r.re * u.re + r.im * u.im < 0.0 {
        r = -r;
    }
    (w + r, u / r)
}

/// Forward Loewner flow of a single point along the driving path.
///
/// Every grid step freezes `W` at the step's right endpoint and applies the
/// exact constant-driving map; within `10√dt` of `W` the step is split into
/// substeps with `W` interpolated linearly. The point counts as swallowed
/// once `|g_t(z) - W_t| < 2√dt` (or, for real points, when `W` jumps over
/// it).
pub fn evolve_point(z: Complex64, path: &DrivingPath) -> Result<PointFlow> {
    if z.im < 0.0 {
        return Err(Error::Domain(format!("point {z} lies below the real line")));
    }
    let dt = path.dt();
    let radius = 2.0 * dt.sqrt();
    let near = 10.0 * dt.sqrt();
    let real = z.im == 0.0;
    let mut g = z;
    let mut dg = Complex64::new(1.0, 0.0);
    let mut out = PointFlow {
        times: vec![path.times[0]],
        values: vec![g],
        derivatives: vec![dg],
        swallow_time: None,
    };
    if path.len() < 2 {
        return Ok(out);
    }
    if (g - path.w[0]).norm() < radius {
        out.swallow_time = Some(path.times[0]);
        return Ok(out);
    }
    for k in 1..path.len() {
        let (w0, w1) = (path.w[k - 1], path.w[k]);
        let (t0, t1) = (path.times[k - 1], path.times[k]);
        let h = t1 - t0;
        let subs = if (g - w0).norm() < near || (g - w1).norm() < near {
            NEAR_SUBSTEPS
        } else {
            1
        };
        let hs = h / subs as f64;
        let mut w_prev = w0;
        for j in 1..=subs {
            let w = w0 + (w1 - w0) * (j as f64 / subs as f64);
            let t = t0 + hs * j as f64;
            if real && (g.re - w).signum() != (g.re - w_prev).signum() {
                out.swallow_time = Some(t);
                return Ok(out);
            }
            let (g_new, factor) = slit_step(g, w, hs);
            g = g_new;
            dg *= factor;
            w_prev = w;
            if !g.re.is_finite() || !g.im.is_finite() {
                return Err(Error::Numeric {
                    step: k,
                    message: format!("Loewner flow of {z} became non-finite"),
                });
            }
            if (g - w).norm() < radius {
                out.times.push(t);
                out.values.push(g);
                out.derivatives.push(dg);
                out.swallow_time = Some(t);
                return Ok(out);
            }
        }
        out.times.push(t1);
        out.values.push(g);
        out.derivatives.push(dg);
    }
    Ok(out)
}
