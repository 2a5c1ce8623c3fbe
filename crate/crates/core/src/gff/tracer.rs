use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LatticeField;
use crate::error::{Error, Result};
use crate::trace::{Termination, Trace, TraceMeta};

/// Flow-line integration settings (lengths in pixels).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracerConfig {
    pub chi: f64,
    pub step: f64,
    pub max_len: f64,
    /// Heading reversal (degrees) that counts as a self-trap.
    pub trap_angle_deg: f64,
    /// Revisit radius for the self-trap test.
    pub trap_radius: f64,
    /// Recent arc length ignored by the self-trap test.
    pub trap_skip: f64,
}

impl TracerConfig {
    pub fn new(chi: f64, step: f64, max_len: f64) -> Self {
        Self {
            chi,
            step,
            max_len,
            trap_angle_deg: 170.0,
            trap_radius: 1.0,
            trap_skip: 3.0,
        }
    }
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Spatial hash of visited points for the self-trap test.
struct Visits {
    cell: f64,
    map: HashMap<(i64, i64), Vec<u32>>,
}

impl Visits {
    fn key(&self, z: Complex64) -> (i64, i64) {
        ((z.re / self.cell).floor() as i64, (z.im / self.cell).floor() as i64)
    }

    fn insert(&mut self, z: Complex64, idx: usize) {
        let k = self.key(z);
        self.map.entry(k).or_default().push(idx as u32);
    }

    fn near(&self, z: Complex64) -> impl Iterator<Item = usize> + '_ {
        let (cx, cy) = self.key(z);
        (-1..=1).flat_map(move |dx| {
            (-1..=1).flat_map(move |dy| {
                self.map
                    .get(&(cx + dx, cy + dy))
                    .into_iter()
                    .flat_map(|v| v.iter().map(|&i| i as usize))
            })
        })
    }
}

/// Parameter in `(0, 1]` where the segment `p → q` leaves the box
/// `[0, xm] × [0, ym]`, assuming `p` is inside.
fn exit_param(p: Complex64, q: Complex64, xm: f64, ym: f64) -> f64 {
    let d = q - p;
    let mut s: f64 = 1.0;
    if q.re < 0.0 {
        s = s.min(-p.re / d.re);
    }
    if q.re > xm {
        s = s.min((xm - p.re) / d.re);
    }
    if q.im < 0.0 {
        s = s.min(-p.im / d.im);
    }
    if q.im > ym {
        s = s.min((ym - p.im) / d.im);
    }
    s.clamp(0.0, 1.0)
}

/// Flow line of angle `θ`: integrates `η' = e^{i(π/2 + h(η)/χ + θ)}` at unit
/// speed with the midpoint rule and bilinear interpolation of `field`
/// (which should already be smoothed). The `π/2` makes zero field point
/// north, into the domain from the bottom edge.
///
/// Stops on leaving the grid (last segment clipped to the edge), at
/// `max_len`, or when the curve comes back within `trap_radius` of an
/// earlier point (older than `trap_skip` of arc length) heading the
/// opposite way.
pub fn trace_flow_line(field: &LatticeField, start: Complex64, theta: f64, cfg: &TracerConfig) -> Result<Trace> {
    if cfg.chi == 0.0 || !cfg.chi.is_finite() {
        return Err(Error::param("flow lines need χ ≠ 0 (κ = 4 is unsupported)"));
    }
    if !(cfg.step > 0.0) || !(cfg.max_len > 0.0) {
        return Err(Error::param("tracer step and max_len must be positive"));
    }
    let xm = (field.nx - 1) as f64;
    let ym = (field.ny - 1) as f64;
    if !(start.re > 0.0 && start.re < xm && start.im > 0.0 && start.im < ym) {
        return Err(Error::Domain(format!("start {start} is not strictly inside the grid")));
    }
    let heading = |z: Complex64| PI / 2.0 + field.bilinear(z.re, z.im) / cfg.chi + theta;
    let trap_cos = cfg.trap_angle_deg.to_radians();
    let skip = (cfg.trap_skip / cfg.step).ceil() as usize;
    let max_steps = (cfg.max_len / cfg.step).ceil() as usize;

    let mut points = vec![start];
    let mut times = vec![0.0];
    let mut headings = vec![heading(start)];
    let mut visits = Visits {
        cell: cfg.trap_radius.max(1e-9),
        map: HashMap::new(),
    };
    visits.insert(start, 0);
    let mut termination = Termination::MaxLength;
    let mut p = start;
    let mut len = 0.0;
    for k in 1..=max_steps {
        let h = cfg.step.min(cfg.max_len - len);
        if h <= 0.0 {
            break;
        }
        let phi1 = heading(p);
        let mid = p + Complex64::from_polar(0.5 * h, phi1);
        let phi2 = heading(mid);
        let q = p + Complex64::from_polar(h, phi2);
        if !q.re.is_finite() || !q.im.is_finite() {
            return Err(Error::Numeric {
                step: k,
                message: "flow line left the finite plane".into(),
            });
        }
        if q.re < 0.0 || q.re > xm || q.im < 0.0 || q.im > ym {
            let s = exit_param(p, q, xm, ym);
            let e = p + (q - p) * s;
            points.push(Complex64::new(e.re.clamp(0.0, xm), e.im.clamp(0.0, ym)));
            times.push(len + s * h);
            termination = Termination::Boundary;
            break;
        }
        len += h;
        points.push(q);
        times.push(len);
        headings.push(phi2);
        let trapped = visits.near(q).any(|j| {
            j + skip < k
                && (points[j] - q).norm() <= cfg.trap_radius
                && angle_gap(headings[j], phi2) > trap_cos
        });
        if trapped {
            termination = Termination::SelfTrap;
            break;
        }
        visits.insert(q, k);
        p = q;
    }
    Ok(Trace {
        points,
        times,
        meta: TraceMeta {
            origin: start,
            angle: Some(theta),
            termination,
        },
    })
}
