use num_complex::Complex64;

use super::driving::DrivingPath;
use crate::error::{Error, Result};
use crate::trace::{Termination, Trace, TraceMeta};

/// Principal square root without the polar detour.
#[inline]
fn csqrt(re: f64, im: f64) -> (f64, f64) {
    if re == 0.0 && im == 0.0 {
        return (0.0, 0.0);
    }
    let r = (re * re + im * im).sqrt();
    if re >= 0.0 {
        let s = (0.5 * (r + re)).sqrt();
        (s, 0.5 * im / s)
    } else {
        let s = (0.5 * (r - re)).sqrt();
        (0.5 * im.abs() / s, s.copysign(im))
    }
}

/// Inverse of the one-step slit map: `w + √((z-w)² - s²)` on the branch
/// with nonnegative imaginary part, `s = 2√h`. Maps the upper half-plane
/// onto itself minus the vertical slit `[w, w + is]`.
#[inline]
fn unzip(z: (f64, f64), w: f64, s: f64) -> (f64, f64) {
    let ur = z.0 - w;
    let ui = z.1.max(0.0);
    // (u - s)(u + s) keeps the product accurate near the slit base
    let (ar, br) = (ur - s, ur + s);
    let pr = ar * br - ui * ui;
    let pi = ui * (ar + br);
    let (mut rr, mut ri) = csqrt(pr, pi);
    if ri < 0.0 || (ri == 0.0 && ur < 0.0 && rr > 0.0) {
        rr = -rr;
        ri = -ri;
    }
    (w + rr, ri.max(0.0))
}

/// Trace point `γ(t_k) = g_{t_k}^{-1}(W_k)` by backward composition of the
/// elementary inverse maps of steps `k, k-1, …, 1`.
fn tip(w: &[f64], s: &[f64], k: usize) -> (f64, f64) {
    let mut z = (w[k], 0.0);
    for j in (1..=k).rev() {
        z = unzip(z, w[j], s[j]);
    }
    z
}

/// Base of slit `k` pulled back by steps `k-1, …, 1`: the point of the
/// earlier hull boundary (or of ℝ) from which the curve grows on step `k`.
fn slit_base(w: &[f64], s: &[f64], k: usize) -> (f64, f64) {
    let mut z = (w[k], 0.0);
    for j in (1..k).rev() {
        z = unzip(z, w[j], s[j]);
    }
    z
}

/// Trace of the Loewner chain driven by `path` (vertical-slit zipper).
///
/// One point per grid time; `γ(0) = W_0`. Cost is quadratic in the number
/// of steps.
pub fn loewner_trace(path: &DrivingPath) -> Result<Trace> {
    let s = slit_heights(path);
    let mut points = Vec::with_capacity(path.len());
    for k in 0..path.len() {
        let (re, im) = tip(&path.w, &s, k);
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Numeric {
                step: k,
                message: "zipper composition produced a non-finite point".into(),
            });
        }
        points.push(Complex64::new(re, im));
    }
    let mut tr = loewner_trace_meta(path);
    tr.points = points;
    tr.times = path.times.clone();
    Ok(tr)
}

/// Like [`loewner_trace`] with each tip preceded by its slit base, so that
/// stretches where the curve runs along ℝ or along its own past within one
/// step are not replaced by a chord. Times repeat for base and tip.
pub fn loewner_slit_curve(path: &DrivingPath) -> Result<Trace> {
    let s = slit_heights(path);
    let mut points = Vec::with_capacity(2 * path.len());
    let mut times = Vec::with_capacity(2 * path.len());
    for k in 0..path.len() {
        let pts = if k == 0 {
            vec![tip(&path.w, &s, 0)]
        } else {
            vec![slit_base(&path.w, &s, k), tip(&path.w, &s, k)]
        };
        for (re, im) in pts {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Numeric {
                    step: k,
                    message: "zipper composition produced a non-finite point".into(),
                });
            }
            points.push(Complex64::new(re, im));
            times.push(path.times[k]);
        }
    }
    let mut tr = loewner_trace_meta(path);
    tr.points = points;
    tr.times = times;
    Ok(tr)
}

fn loewner_trace_meta(path: &DrivingPath) -> Trace {
    Trace {
        points: Vec::new(),
        times: Vec::new(),
        meta: TraceMeta {
            origin: Complex64::new(path.w[0], 0.0),
            angle: None,
            termination: if path.threshold_time.is_some() {
                Termination::Threshold
            } else {
                Termination::Complete
            },
        },
    }
}

fn slit_heights(path: &DrivingPath) -> Vec<f64> {
    let mut s = vec![0.0; path.len()];
    for k in 1..path.len() {
        s[k] = 2.0 * (path.times[k] - path.times[k - 1]).sqrt();
    }
    s
}

/// Computes trace points one at a time so callers can stop early.
pub struct TraceCursor<'a> {
    path: &'a DrivingPath,
    s: Vec<f64>,
    next: usize,
}

impl<'a> TraceCursor<'a> {
    pub fn new(path: &'a DrivingPath) -> Self {
        Self {
            s: slit_heights(path),
            path,
            next: 0,
        }
    }
}

impl Iterator for TraceCursor<'_> {
    type Item = Result<(f64, Complex64)>;

    fn next(&mut self) -> Option<Self::Item> {
        let k = self.next;
        if k >= self.path.len() {
            return None;
        }
        self.next += 1;
        let (re, im) = tip(&self.path.w, &self.s, k);
        if !re.is_finite() || !im.is_finite() {
            return Some(Err(Error::Numeric {
                step: k,
                message: "zipper composition produced a non-finite point".into(),
            }));
        }
        Some(Ok((self.path.times[k], Complex64::new(re, im))))
    }
}
