use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::driving::DrivingPath;
use crate::error::{Error, Result};

/// Real marked point with its weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub x: f64,
    pub rho: f64,
}

/// Loewner images `g_t(x_j)` and derivatives `g_t'(x_j)` of real marked
/// points, advanced step by step along a driving function.
#[derive(Debug, Clone, PartialEq)]
pub struct SwState {
    pub kappa: f64,
    pub marked: Vec<MarkedPoint>,
    pub g: Vec<f64>,
    pub dg: Vec<f64>,
    pub w: f64,
    pub t: f64,
    /// First marked point found swallowed, with the time.
    pub swallowed: Option<(f64, f64)>,
    radius: f64,
}

impl SwState {
    /// State at time 0 with `W_0 = w0`; `dt` sets the swallow radius `2√dt`.
    pub fn new(kappa: f64, marked: &[MarkedPoint], w0: f64, dt: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::param(format!("κ must be positive, got {kappa}")));
        }
        let radius = 2.0 * dt.sqrt();
        let mut st = Self {
            kappa,
            marked: marked.to_vec(),
            g: marked.iter().map(|m| m.x).collect(),
            dg: vec![1.0; marked.len()],
            w: w0,
            t: 0.0,
            swallowed: None,
            radius,
        };
        st.check_swallow();
        Ok(st)
    }

    fn check_swallow(&mut self) {
        if self.swallowed.is_some() {
            return;
        }
        if let Some(m) = self.marked.iter().zip(&self.g).find(|(_, &g)| (g - self.w).abs() < self.radius) {
            self.swallowed = Some((m.0.x, self.t));
        }
    }

    /// Advances by `h` to driving value `w_new` (frozen over the step).
    pub fn advance(&mut self, w_new: f64, h: f64) {
        if self.swallowed.is_some() {
            return;
        }
        for j in 0..self.g.len() {
            let before = self.g[j] - self.w;
            let d = self.g[j] - w_new;
            if d.signum() != before.signum() {
                self.swallowed = Some((self.marked[j].x, self.t + h));
            }
            let d_new = d.signum() * (d * d + 4.0 * h).sqrt();
            self.dg[j] *= d / d_new;
            self.g[j] = w_new + d_new;
        }
        self.w = w_new;
        self.t += h;
        self.check_swallow();
    }

    /// The boundary specialisation of the Schramm–Wilson martingale,
    /// `Π |g'(x_j)|^{(8-2κ+2ρ_j)ρ_j/(8κ)} |W - g(x_j)|^{ρ_j/κ}
    ///  Π_{j<j'} |g(x_j) - g(x_j')|^{ρ_j ρ_j'/(2κ)}`.
    pub fn weight(&self) -> Result<f64> {
        if let Some((point, time)) = self.swallowed {
            return Err(Error::Swallowed { point, time });
        }
        Ok(self.weight_unchecked())
    }

    fn weight_unchecked(&self) -> f64 {
        let k = self.kappa;
        let mut log_m = 0.0;
        for j in 0..self.marked.len() {
            let rho = self.marked[j].rho;
            if rho == 0.0 {
                continue;
            }
            log_m += (8.0 - 2.0 * k + 2.0 * rho) * rho / (8.0 * k) * self.dg[j].abs().ln();
            log_m += rho / k * (self.w - self.g[j]).abs().ln();
            for jj in j + 1..self.marked.len() {
                let rr = rho * self.marked[jj].rho;
                if rr != 0.0 {
                    log_m += rr / (2.0 * k) * (self.g[j] - self.g[jj]).abs().ln();
                }
            }
        }
        log_m.exp()
    }

    /// Weight at the current state even if a point was just swallowed
    /// (the value at the stopping time on the grid).
    pub fn stopped_weight(&self) -> f64 {
        self.weight_unchecked()
    }
}

/// `M_t` at grid index `step` for the given driving path.
pub fn sw_weight(kappa: f64, path: &DrivingPath, marked: &[MarkedPoint], step: usize) -> Result<f64> {
    if step >= path.len() {
        return Err(Error::param(format!("step {step} beyond path of length {}", path.len())));
    }
    let mut st = SwState::new(kappa, marked, path.w[0], path.dt())?;
    for k in 1..=step {
        st.advance(path.w[k], path.times[k] - path.times[k - 1]);
    }
    st.weight()
}

/// `M_{T∧σ}` for one SLE_κ path, σ the first swallowing of a marked point.
pub fn sw_stopped_sample<R: Rng + ?Sized>(
    kappa: f64,
    marked: &[MarkedPoint],
    t_end: f64,
    dt: f64,
    rng: &mut R,
) -> Result<f64> {
    let n = (t_end / dt).round().max(1.0) as usize;
    let h = t_end / n as f64;
    let mut st = SwState::new(kappa, marked, 0.0, h)?;
    let mut w = 0.0;
    let scale = (kappa * h).sqrt();
    for _ in 0..n {
        if st.swallowed.is_some() {
            break;
        }
        let z: f64 = rng.sample(StandardNormal);
        w += scale * z;
        st.advance(w, h);
    }
    Ok(st.stopped_weight())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loewner::driving::drive_sle;
    use crate::rng::stream;
    use crate::stats::mean_se;

    #[test]
    fn zero_weights_give_one() {
        let mut rng = stream(1, "loewner", 0, "sw");
        let path = drive_sle(2.0, &[], 0.1, 1e-3, &mut rng).unwrap();
        let m = [MarkedPoint { x: 1.0, rho: 0.0 }, MarkedPoint { x: -2.0, rho: 0.0 }];
        assert_eq!(sw_weight(2.0, &path, &m, path.len() - 1).unwrap(), 1.0);
    }

    #[test]
    fn initial_value_single_point() {
        let path = DrivingPath::constant(0.0, 1.0, 0.01).unwrap();
        for rho in [-1.0, 0.5, 3.0] {
            let m = [MarkedPoint { x: 1.0, rho }];
            assert!((sw_weight(2.0, &path, &m, 0).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn swallowed_point_is_an_error() {
        let path = DrivingPath::from_samples(vec![0.0, 0.01, 0.02], vec![0.0, 0.5, 2.0]).unwrap();
        let m = [MarkedPoint { x: 1.0, rho: 1.0 }];
        match sw_weight(2.0, &path, &m, 2) {
            Err(Error::Swallowed { point, .. }) => assert_eq!(point, 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn martingale_mean() {
        let mut rng = stream(2, "loewner", 0, "sw-mg");
        let m = [MarkedPoint { x: 1.0, rho: 1.0 }];
        let xs: Vec<f64> = (0..10_000)
            .map(|_| sw_stopped_sample(2.0, &m, 0.05, 1e-4, &mut rng).unwrap())
            .collect();
        let s = mean_se(&xs);
        assert!(s.z_score(1.0).abs() < 4.0, "{s:?}");
    }
}
