//! Type-I discrete sine transform through a real-odd FFT embedding.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Unnormalised DST-I of length `m`:
/// `X_k = Σ_{n=1}^{m} x_n sin(π n k / (m+1))`, `k = 1..m`.
pub struct Dst1 {
    m: usize,
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Dst1 {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1);
        let n = 2 * (m + 1);
        let fft = FftPlanner::new().plan_fft_forward(n);
        let scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        Self {
            m,
            fft,
            buf: vec![Complex64::new(0.0, 0.0); n],
            scratch,
        }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Transforms `data` (length `m`) in place.
    pub fn apply(&mut self, data: &mut [f64]) {
        let m = self.m;
        debug_assert_eq!(data.len(), m);
        // odd extension [0, x, 0, -rev(x)] turns the FFT into -2i·DST
        self.buf[0] = Complex64::new(0.0, 0.0);
        self.buf[m + 1] = Complex64::new(0.0, 0.0);
        for (i, &x) in data.iter().enumerate() {
            self.buf[i + 1] = Complex64::new(x, 0.0);
            self.buf[2 * m + 1 - i] = Complex64::new(-x, 0.0);
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (k, out) in data.iter_mut().enumerate() {
            *out = -0.5 * self.buf[k + 1].im;
        }
    }
}

/// DST-I along both axes of a row-major `mx × my` array.
pub struct Dst2 {
    mx: usize,
    my: usize,
    row: Dst1,
    col: Dst1,
    tmp: Vec<f64>,
}

impl Dst2 {
    pub fn new(mx: usize, my: usize) -> Self {
        Self {
            mx,
            my,
            row: Dst1::new(mx),
            col: Dst1::new(my),
            tmp: vec![0.0; my],
        }
    }

    pub fn apply(&mut self, data: &mut [f64]) {
        let (mx, my) = (self.mx, self.my);
        debug_assert_eq!(data.len(), mx * my);
        for r in data.chunks_exact_mut(mx) {
            self.row.apply(r);
        }
        for x in 0..mx {
            for y in 0..my {
                self.tmp[y] = data[y * mx + x];
            }
            self.col.apply(&mut self.tmp);
            for y in 0..my {
                data[y * mx + x] = self.tmp[y];
            }
        }
    }
}

/// Eigenvalues `4 - 2cos(πj/(mx+1)) - 2cos(πk/(my+1))` of the combinatorial
/// Dirichlet Laplacian on an `mx × my` interior, row-major in `(j, k)`.
pub fn laplacian_eigenvalues(mx: usize, my: usize) -> Vec<f64> {
    let cx: Vec<f64> = (1..=mx)
        .map(|j| 2.0 - 2.0 * (std::f64::consts::PI * j as f64 / (mx + 1) as f64).cos())
        .collect();
    let cy: Vec<f64> = (1..=my)
        .map(|k| 2.0 - 2.0 * (std::f64::consts::PI * k as f64 / (my + 1) as f64).cos())
        .collect();
    let mut out = Vec::with_capacity(mx * my);
    for ky in &cy {
        for jx in &cx {
            out.push(jx + ky);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive(x: &[f64]) -> Vec<f64> {
        let m = x.len();
        (1..=m)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(i, v)| v * (PI * (i + 1) as f64 * k as f64 / (m + 1) as f64).sin())
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_transform() {
        for m in [1usize, 2, 5, 15, 31] {
            let x: Vec<f64> = (0..m).map(|i| ((i * 7 + 3) % 11) as f64 - 4.5).collect();
            let mut y = x.clone();
            Dst1::new(m).apply(&mut y);
            for (a, b) in y.iter().zip(naive(&x)) {
                assert!((a - b).abs() < 1e-10, "m={m}");
            }
        }
    }

    #[test]
    fn involution_up_to_scale() {
        let m = 20;
        let x: Vec<f64> = (0..m).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut y = x.clone();
        let mut d = Dst1::new(m);
        d.apply(&mut y);
        d.apply(&mut y);
        for (a, b) in y.iter().zip(&x) {
            assert!((a * 2.0 / (m + 1) as f64 - b).abs() < 1e-12);
        }
    }
}
