//! Bessel and squared Bessel processes, Bessel excursions and the Itô
//! excursion point process.
//!
//! All path sampling goes through [`besq_step`], which draws an exact
//! BESQ^δ transition from the noncentral chi-square law (Poisson mixture of
//! gammas). Marginals are therefore exact on any time grid, including near
//! zero and for fractional δ.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::special::bessel_i_scaled;

/// Below this starting point the density uses the `x = 0` closed form.
pub const X_ZERO_THRESHOLD: f64 = 1e-10;

/// Longest grid attached to a single excursion of the point process.
pub const MAX_EXCURSION_STEPS: usize = 4096;

/// Dimension `δ` of a Bessel process with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselParams {
    pub delta: f64,
    /// Drift coefficient `a = (δ-1)/2` of `dX = a/X dt + dB`.
    pub drift_a: f64,
    /// Index `ν = δ/2 - 1`.
    pub nu: f64,
}

impl BesselParams {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::param(format!("Bessel dimension must be positive, got {delta}")));
        }
        Ok(Self {
            delta,
            drift_a: (delta - 1.0) / 2.0,
            nu: delta / 2.0 - 1.0,
        })
    }
}

/// Dimension of the Bessel process underlying SLE_κ(ρ) with one force point.
pub fn delta_from_rho(rho: f64, kappa: f64) -> f64 {
    1.0 + 2.0 * (rho + 2.0) / kappa
}

/// A path on a nondecreasing time grid starting at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("sample paths are never empty")
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// One exact BESQ^δ transition of duration `dt` from `y`.
///
/// `Y_{dt}/dt` is noncentral chi-square with `δ` degrees of freedom and
/// noncentrality `y/dt`, sampled as `Gamma(δ/2 + N, 2)` with
/// `N ~ Poisson(y/(2dt))`.
pub fn besq_step<R: Rng + ?Sized>(y: f64, delta: f64, dt: f64, rng: &mut R) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::param(format!("time step must be positive, got {dt}")));
    }
    if !(delta > 0.0) {
        return Err(Error::param(format!("Bessel dimension must be positive, got {delta}")));
    }
    if !(y >= 0.0) {
        return Err(Error::param(format!("BESQ state must be nonnegative, got {y}")));
    }
    Ok(besq_step_unchecked(y, delta, dt, rng))
}

pub(crate) fn besq_step_unchecked<R: Rng + ?Sized>(y: f64, delta: f64, dt: f64, rng: &mut R) -> f64 {
    let half_lambda = 0.5 * y / dt;
    let n = if half_lambda > 0.0 {
        Poisson::new(half_lambda)
            .expect("finite positive Poisson mean")
            .sample(rng)
    } else {
        0.0
    };
    let shape = 0.5 * delta + n;
    let g: f64 = Gamma::new(shape, 2.0).expect("positive gamma shape").sample(rng);
    dt * g
}

/// BESQ^δ path on the given grid starting from `y0`.
pub fn sample_besq_on_grid<R: Rng + ?Sized>(delta: f64, y0: f64, times: &[f64], rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut y = y0;
    out.push(y);
    for w in times.windows(2) {
        let h = w[1] - w[0];
        if h > 0.0 {
            y = besq_step_unchecked(y, delta, h, rng);
        }
        out.push(y);
    }
    out
}

pub(crate) fn uniform_grid(t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::param(format!("time horizon must be positive, got {t_end}")));
    }
    if !(dt > 0.0) {
        return Err(Error::param(format!("time step must be positive, got {dt}")));
    }
    let n = (t_end / dt).round().max(1.0) as usize;
    let h = t_end / n as f64;
    Ok((0..=n).map(|k| k as f64 * h).collect())
}

/// BES^δ path `X = √Y` with `Y` an exactly sampled BESQ^δ from `x0²`.
pub fn sample_bessel_path<R: Rng + ?Sized>(
    params: &BesselParams,
    x0: f64,
    t_end: f64,
    dt: f64,
    rng: &mut R,
) -> Result<SamplePath> {
    if !(x0 >= 0.0) {
        return Err(Error::param(format!("starting point must be nonnegative, got {x0}")));
    }
    let times = uniform_grid(t_end, dt)?;
    let values = sample_besq_on_grid(params.delta, x0 * x0, &times, rng)
        .into_iter()
        .map(f64::sqrt)
        .collect();
    Ok(SamplePath { times, values })
}

/// Transition density `p_t(x, y)` of BES^δ.
pub fn bessel_transition_density(params: &BesselParams, t: f64, x: f64, y: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("density needs t > 0, got {t}")));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("density needs x >= 0, got {x}")));
    }
    if !(y > 0.0) {
        return Err(Error::Domain(format!("density needs y > 0, got {y}")));
    }
    let nu = params.nu;
    if x <= X_ZERO_THRESHOLD {
        // 2^{-ν} t^{-(ν+1)} Γ(ν+1)^{-1} y^{2ν+1} exp(-y²/2t)
        let log_p = -nu * std::f64::consts::LN_2 - (nu + 1.0) * t.ln() - ln_gamma(nu + 1.0)
            + (2.0 * nu + 1.0) * y.ln()
            - y * y / (2.0 * t);
        return Ok(log_p.exp());
    }
    // t^{-1} (y/x)^ν y exp(-(x²+y²)/2t) I_ν(xy/t), with the e^{xy/t} factor
    // folded into the scaled Bessel function
    let z = x * y / t;
    let log_pref = -t.ln() + nu * (y / x).ln() + y.ln() - (x - y) * (x - y) / (2.0 * t);
    Ok(log_pref.exp() * bessel_i_scaled(nu, z))
}

/// `∫ p_t(x, y) dy` by composite Simpson in `u = √y` over
/// `y ≤ (x + 12√t)²`, which leaves out less than `e^{-70}` of the mass.
pub fn density_mass(params: &BesselParams, t: f64, x: f64, intervals: usize) -> Result<f64> {
    let m = intervals.max(2) + intervals % 2;
    let u_max = (x + 12.0 * t.sqrt()).max(f64::MIN_POSITIVE);
    let h = u_max / m as f64;
    let f = |u: f64| -> Result<f64> {
        if u == 0.0 {
            return Ok(0.0);
        }
        Ok(2.0 * u * bessel_transition_density(params, t, x, u * u)?)
    };
    let mut acc = f(0.0)? + f(u_max)?;
    for k in 1..m {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h)?;
    }
    Ok(acc * h / 3.0)
}

/// A positive excursion from 0 back to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Excursion {
    pub length: f64,
    pub path: SamplePath,
}

impl Excursion {
    /// Endpoint tolerance `10⁻¹² √length`.
    pub fn tol_zero(&self) -> f64 {
        1e-12 * self.length.sqrt()
    }
}

/// BES^δ excursion of the given length for `δ ∈ (0, 2)`.
///
/// Built from a BES^{4-δ} process `Y` started at 0 through the bridge time
/// change `Z_u = (1-u) Y_{u/(1-u)}`, then Brownian-scaled to `length`.
pub fn sample_bessel_excursion<R: Rng + ?Sized>(
    params: &BesselParams,
    length: f64,
    dt: f64,
    rng: &mut R,
) -> Result<Excursion> {
    if !(params.delta > 0.0 && params.delta < 2.0) {
        return Err(Error::param(format!(
            "Bessel excursions need 0 < δ < 2, got {}",
            params.delta
        )));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::param(format!("excursion length must be positive, got {length}")));
    }
    if !(dt > 0.0) {
        return Err(Error::param(format!("time step must be positive, got {dt}")));
    }
    let steps = ((length / dt).ceil() as usize).clamp(2, MAX_EXCURSION_STEPS);
    Ok(excursion_with_steps(params.delta, length, steps, rng))
}

fn excursion_with_steps<R: Rng + ?Sized>(delta: f64, length: f64, steps: usize, rng: &mut R) -> Excursion {
    let dual = 4.0 - delta;
    let scale = length.sqrt();
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    let mut y = 0.0;
    let mut s_prev = 0.0;
    times.push(0.0);
    values.push(0.0);
    for k in 1..steps {
        let u = k as f64 / steps as f64;
        let s = u / (1.0 - u);
        y = besq_step_unchecked(y, dual, s - s_prev, rng);
        s_prev = s;
        times.push(u * length);
        values.push(scale * (1.0 - u) * y.sqrt());
    }
    times.push(length);
    values.push(0.0);
    Excursion {
        length,
        path: SamplePath { times, values },
    }
}

/// Atom `(u, t)` of the excursion point process with its excursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionPoint {
    pub local_time: f64,
    pub length: f64,
    pub excursion: Excursion,
}

/// Excursion point process restricted to local time `[0, ε]` and lengths
/// `[t_min, t_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionPpp {
    /// Points sorted by local time.
    pub points: Vec<ExcursionPoint>,
    /// Poisson mean of the point count.
    pub expected_count: f64,
    /// Expected total length of the excursions shorter than `t_min` that the
    /// truncation discards: `ε t_min^{δ/2}`.
    pub dropped_expected_length: f64,
}

/// Intensity `(δ/2) t^{δ/2-2} dt` per unit local time: mass of `[t_min, t_max]`.
pub fn excursion_length_mass(delta: f64, t_min: f64, t_max: f64) -> f64 {
    let p = delta / 2.0 - 1.0; // < 0
    let upper = if t_max.is_infinite() { 0.0 } else { t_max.powf(p) };
    (delta / 2.0) * (t_min.powf(p) - upper) / (-p)
}

fn check_ppp_args(params: &BesselParams, eps: f64, t_min: f64, t_max: f64) -> Result<()> {
    if !(params.delta > 0.0 && params.delta < 2.0) {
        return Err(Error::param(format!(
            "the excursion point process needs 0 < δ < 2, got {}",
            params.delta
        )));
    }
    if !(t_min > 0.0) {
        return Err(Error::param(format!(
            "t_min must be positive (the length intensity is not integrable at 0), got {t_min}"
        )));
    }
    if !(t_max > t_min) {
        return Err(Error::param(format!("need t_min < t_max, got {t_min} and {t_max}")));
    }
    if !(eps >= 0.0) {
        return Err(Error::param(format!("local time budget must be nonnegative, got {eps}")));
    }
    Ok(())
}

/// Atoms `(u, t)` only, sorted by `u`; no excursion paths are drawn.
pub fn sample_excursion_ppp_atoms<R: Rng + ?Sized>(
    params: &BesselParams,
    eps: f64,
    t_min: f64,
    t_max: f64,
    rng: &mut R,
) -> Result<Vec<(f64, f64)>> {
    check_ppp_args(params, eps, t_min, t_max)?;
    let mean = eps * excursion_length_mass(params.delta, t_min, t_max);
    if mean == 0.0 {
        return Ok(Vec::new());
    }
    let count = Poisson::new(mean)
        .map_err(|e| Error::param(format!("Poisson mean {mean}: {e}")))?
        .sample(rng) as usize;
    let p = params.delta / 2.0 - 1.0;
    let lo = t_min.powf(p);
    let hi = if t_max.is_infinite() { 0.0 } else { t_max.powf(p) };
    let mut atoms: Vec<(f64, f64)> = (0..count)
        .map(|_| {
            let u = eps * rng.random::<f64>();
            let v: f64 = rng.random();
            // inverse CDF of t^{p-1} on [t_min, t_max]
            let t = (lo + v * (hi - lo)).powf(1.0 / p);
            (u, t.clamp(t_min, t_max))
        })
        .collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(atoms)
}

/// Excursion point process with an excursion attached to every atom.
pub fn sample_excursion_ppp<R: Rng + ?Sized>(
    params: &BesselParams,
    eps: f64,
    t_min: f64,
    t_max: f64,
    dt: f64,
    rng: &mut R,
) -> Result<ExcursionPpp> {
    if !(dt > 0.0) {
        return Err(Error::param(format!("time step must be positive, got {dt}")));
    }
    let atoms = sample_excursion_ppp_atoms(params, eps, t_min, t_max, rng)?;
    let points = atoms
        .into_iter()
        .map(|(u, t)| {
            let steps = ((t / dt).ceil() as usize).clamp(2, MAX_EXCURSION_STEPS);
            ExcursionPoint {
                local_time: u,
                length: t,
                excursion: excursion_with_steps(params.delta, t, steps, rng),
            }
        })
        .collect();
    Ok(ExcursionPpp {
        points,
        expected_count: eps * excursion_length_mass(params.delta, t_min, t_max),
        dropped_expected_length: eps * t_min.powf(params.delta / 2.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::stats::{ks_one_sample, ks_two_sample, mean_se};
    use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
    use std::f64::consts::PI;

    #[test]
    fn delta_from_rho_examples() {
        assert_eq!(delta_from_rho(-2.0, 2.0), 1.0);
        for &k in &[0.5, 1.0, 2.0, 3.7] {
            assert!((delta_from_rho(k / 2.0 - 2.0, k) - 2.0).abs() < 1e-15);
        }
        // ρ0 = κ/4 - 2 gives 3/2
        assert_eq!(delta_from_rho(-1.5, 2.0), 1.5);
    }

    #[test]
    fn params_invariants() {
        let p = BesselParams::new(1.5).unwrap();
        assert_eq!(p.drift_a, 0.25);
        assert_eq!(p.nu, -0.25);
        assert!(BesselParams::new(0.0).is_err());
        assert!(BesselParams::new(-1.0).is_err());
    }

    #[test]
    fn besq_step_rejects_bad_parameters() {
        let mut rng = stream(0, "bessel", 0, "t");
        assert!(besq_step(1.0, 1.0, 0.0, &mut rng).is_err());
        assert!(besq_step(1.0, 0.0, 0.1, &mut rng).is_err());
        assert!(besq_step(-1.0, 1.0, 0.1, &mut rng).is_err());
    }

    #[test]
    fn besq_step_mean_matches_drift() {
        let mut rng = stream(1, "bessel", 0, "mean");
        for &(y, delta, dt) in &[(0.0, 0.5, 1.0), (1.0, 1.5, 0.3), (2.5, 3.0, 0.1)] {
            let xs: Vec<f64> = (0..20_000)
                .map(|_| besq_step(y, delta, dt, &mut rng).unwrap())
                .collect();
            assert!(xs.iter().all(|&v| v >= 0.0));
            let m = mean_se(&xs);
            assert!(m.z_score(y + delta * dt).abs() < 4.0, "{m:?}");
        }
    }

    #[test]
    fn besq_from_zero_is_chi_square() {
        let mut rng = stream(2, "bessel", 0, "chi2");
        let dt = 0.37;
        let xs: Vec<f64> = (0..100_000)
            .map(|_| besq_step(0.0, 3.0, dt, &mut rng).unwrap() / dt)
            .collect();
        let chi = ChiSquared::new(3.0).unwrap();
        let r = ks_one_sample(&xs, |x| chi.cdf(x));
        assert!(r.p_value > 0.01, "{r:?}");
    }

    #[test]
    fn besq_small_dt_variance() {
        // Var[y'] = 4 y dt + 2 δ dt² exactly; the leading term dominates
        let mut rng = stream(3, "bessel", 0, "var");
        let (y, delta) = (1.0, 2.0);
        let mut ratios = Vec::new();
        for &dt in &[1e-2, 1e-3] {
            let xs: Vec<f64> = (0..40_000)
                .map(|_| besq_step(y, delta, dt, &mut rng).unwrap())
                .collect();
            let m = mean_se(&xs);
            let var = xs.iter().map(|v| (v - m.mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
            ratios.push(var / (4.0 * y * dt));
        }
        for r in &ratios {
            assert!((r - 1.0).abs() < 0.05, "{ratios:?}");
        }
    }

    #[test]
    fn bes1_is_reflected_brownian_motion() {
        let p = BesselParams::new(1.0).unwrap();
        let mut rng = stream(4, "bessel", 0, "bes1");
        let xs: Vec<f64> = (0..5000)
            .map(|_| sample_bessel_path(&p, 0.0, 1.0, 0.05, &mut rng).unwrap().last())
            .collect();
        let normal = Normal::new(0.0, 1.0).unwrap();
        let r = ks_one_sample(&xs, |x| 2.0 * normal.cdf(x) - 1.0);
        assert!(r.p_value > 0.01, "{r:?}");
    }

    #[test]
    fn bes3_second_moment() {
        let p = BesselParams::new(3.0).unwrap();
        let mut rng = stream(5, "bessel", 0, "bes3");
        let t = 0.8;
        let sq: Vec<f64> = (0..20_000)
            .map(|_| sample_bessel_path(&p, 0.0, t, 0.1, &mut rng).unwrap().last().powi(2))
            .collect();
        assert!(mean_se(&sq).z_score(3.0 * t).abs() < 4.0);
    }

    #[test]
    fn bessel_paths_nonnegative_and_positive_for_delta_two() {
        let mut rng = stream(6, "bessel", 0, "pos");
        let p = BesselParams::new(2.0).unwrap();
        for _ in 0..200 {
            let path = sample_bessel_path(&p, 0.0, 1.0, 0.01, &mut rng).unwrap();
            assert!(path.values[1..].iter().all(|&v| v > 0.0));
        }
        let p = BesselParams::new(0.5).unwrap();
        let path = sample_bessel_path(&p, 0.3, 1.0, 0.01, &mut rng).unwrap();
        assert!(path.values.iter().all(|&v| v >= 0.0));
        assert_eq!(path.times.len(), path.values.len());
    }

    #[test]
    fn zero_fraction_at_grid_resolution_shrinks_with_dt() {
        // exact transitions never return exactly 0, so "at zero" means below
        // the grid's spatial resolution √dt/10
        let p = BesselParams::new(1.5).unwrap();
        let mut rng = stream(7, "bessel", 0, "zeros");
        let frac = |dt: f64, rng: &mut crate::rng::StreamRng| {
            let level = 0.1 * dt.sqrt();
            let mut hits = 0usize;
            let mut total = 0usize;
            for _ in 0..400 {
                let path = sample_bessel_path(&p, 0.0, 1.0, dt, rng).unwrap();
                hits += path.values[1..].iter().filter(|&&v| v < level).count();
                total += path.len() - 1;
            }
            hits as f64 / total as f64
        };
        let coarse = frac(1e-2, &mut rng);
        let fine = frac(1e-3, &mut rng);
        assert!(fine > 0.0, "{coarse} {fine}");
        assert!(fine < coarse, "{coarse} {fine}");
    }

    #[test]
    fn density_closed_forms() {
        let p1 = BesselParams::new(1.0).unwrap();
        for &t in &[0.3, 1.0, 2.0] {
            for i in 1..=30 {
                let y = 0.1 * i as f64;
                let expect = (2.0 / (PI * t)).sqrt() * (-y * y / (2.0 * t)).exp();
                let got = bessel_transition_density(&p1, t, 0.0, y).unwrap();
                assert!((got - expect).abs() < 1e-12);
                // reflected Brownian motion from x > 0
                let x = 0.7;
                let refl = ((-(y - x) * (y - x) / (2.0 * t)).exp() + (-(y + x) * (y + x) / (2.0 * t)).exp())
                    / (2.0 * PI * t).sqrt();
                let got = bessel_transition_density(&p1, t, x, y).unwrap();
                assert!((got - refl).abs() < 1e-12, "t={t} y={y}: {got} vs {refl}");
            }
        }
        let p3 = BesselParams::new(3.0).unwrap();
        let v = bessel_transition_density(&p3, 1.0, 0.0, 1.0).unwrap();
        assert!((v - 0.48394144903828673).abs() < 1e-12);
        assert!(bessel_transition_density(&p3, 1.0, 0.0, 0.0).is_err());
        assert!(bessel_transition_density(&p3, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn density_branch_is_continuous_at_zero() {
        for &d in &[0.7, 1.5, 2.5, 4.0] {
            let p = BesselParams::new(d).unwrap();
            let a = bessel_transition_density(&p, 0.8, 0.0, 0.9).unwrap();
            let b = bessel_transition_density(&p, 0.8, 1e-6, 0.9).unwrap();
            assert!((a - b).abs() < 1e-6 * a, "δ={d}: {a} vs {b}");
        }
    }

    #[test]
    fn excursion_requires_subcritical_dimension() {
        let mut rng = stream(8, "bessel", 0, "exc");
        for &d in &[2.0, 2.5] {
            let p = BesselParams::new(d).unwrap();
            assert!(sample_bessel_excursion(&p, 1.0, 0.01, &mut rng).is_err());
        }
    }

    #[test]
    fn excursion_endpoints_and_interior() {
        let p = BesselParams::new(1.2).unwrap();
        let mut rng = stream(9, "bessel", 0, "exc");
        for &len in &[0.01, 1.0, 7.0] {
            let e = sample_bessel_excursion(&p, len, len / 100.0, &mut rng).unwrap();
            let v = &e.path.values;
            assert!(v[0] <= e.tol_zero() && *v.last().unwrap() <= e.tol_zero());
            assert!(v[1..v.len() - 1].iter().all(|&x| x > 0.0));
            assert!((e.path.times.last().unwrap() - len).abs() < 1e-12);
        }
    }

    #[test]
    fn excursion_height_exceeds_two_with_uniform_positive_probability() {
        // p0 lower bound over δ ∈ (1, 3/2)
        let mut rng = stream(10, "bessel", 0, "p0");
        for &d in &[1.05, 1.25, 1.45] {
            let p = BesselParams::new(d).unwrap();
            let n = 4000;
            let hits = (0..n)
                .filter(|_| sample_bessel_excursion(&p, 1.0, 1.0 / 400.0, &mut rng).unwrap().path.max() > 2.0)
                .count();
            let phat = hits as f64 / n as f64;
            let se = (phat * (1.0 - phat) / n as f64).sqrt();
            assert!(hits > 0 && phat - 3.0 * se > 0.0, "δ={d}: {hits}/{n}");
        }
    }

    #[test]
    fn excursion_maximum_obeys_brownian_scaling() {
        let p = BesselParams::new(1.5).unwrap();
        let mut rng = stream(11, "bessel", 0, "scale");
        let sample = |len: f64, rng: &mut crate::rng::StreamRng| -> Vec<f64> {
            (0..3000)
                .map(|_| sample_bessel_excursion(&p, len, len / 200.0, rng).unwrap().path.max() / len.sqrt())
                .collect()
        };
        let a = sample(0.25, &mut rng);
        let b = sample(1.0, &mut rng);
        let r = ks_two_sample(&a, &b);
        assert!(r.p_value > 0.01, "{r:?}");
    }

    #[test]
    fn ppp_errors_and_empty_budget() {
        let p = BesselParams::new(1.5).unwrap();
        let mut rng = stream(12, "bessel", 0, "ppp");
        assert!(sample_excursion_ppp(&p, 0.1, 0.0, 1.0, 0.01, &mut rng).is_err());
        assert!(sample_excursion_ppp(&p, 0.1, -1.0, 1.0, 0.01, &mut rng).is_err());
        assert!(sample_excursion_ppp(&BesselParams::new(2.5).unwrap(), 0.1, 0.1, 1.0, 0.01, &mut rng).is_err());
        let empty = sample_excursion_ppp(&p, 0.0, 1e-3, 1.0, 0.01, &mut rng).unwrap();
        assert!(empty.points.is_empty());
    }

    #[test]
    fn ppp_big_jump_mean() {
        // δ/(2-δ) ε for lengths ≥ 1
        let p = BesselParams::new(1.5).unwrap();
        assert!((excursion_length_mass(1.5, 1.0, f64::INFINITY) * 0.1 - 0.3).abs() < 1e-14);
        let mut rng = stream(13, "bessel", 0, "ppp");
        let counts: Vec<f64> = (0..20_000)
            .map(|_| sample_excursion_ppp_atoms(&p, 0.1, 1.0, f64::INFINITY, &mut rng).unwrap().len() as f64)
            .collect();
        assert!(mean_se(&counts).z_score(0.3).abs() < 4.0);
    }

    #[test]
    fn ppp_points_sorted_in_range_with_attached_excursions() {
        let p = BesselParams::new(1.3).unwrap();
        let mut rng = stream(14, "bessel", 0, "ppp");
        let ppp = sample_excursion_ppp(&p, 1.0, 1e-4, 2.0, 0.01, &mut rng).unwrap();
        assert!(!ppp.points.is_empty());
        for w in ppp.points.windows(2) {
            assert!(w[0].local_time <= w[1].local_time);
        }
        for pt in &ppp.points {
            assert!(pt.local_time >= 0.0 && pt.local_time <= 1.0);
            assert!(pt.length >= 1e-4 && pt.length <= 2.0);
            assert_eq!(pt.excursion.length, pt.length);
        }
        assert!((ppp.dropped_expected_length - 1e-4f64.powf(0.65)).abs() < 1e-15);
    }
}
