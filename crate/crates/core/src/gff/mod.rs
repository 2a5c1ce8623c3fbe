//! Discrete Gaussian free field on a rectangle with piecewise constant
//! Dirichlet data, and flow lines of the formal vector field `e^{i(h/χ+θ)}`.

pub mod dst;
mod tracer;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use dst::{laplacian_eigenvalues, Dst2};

pub use tracer::{trace_flow_line, TracerConfig};

/// Default Gaussian smoothing radius in pixels.
pub const DEFAULT_SMOOTHING: f64 = 1.5;

/// A side of the rectangle. Bottom and top own `x ∈ [0, nx)`; left and right
/// own `y ∈ [1, ny-1)`, so corners belong to the horizontal edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Edge {
    Bottom,
    Right,
    Top,
    Left,
}

/// Half-open index range `[start, end)` along one edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub edge: Edge,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPiece {
    pub arc: Arc,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub pieces: Vec<BoundaryPiece>,
}

fn piece(edge: Edge, start: usize, end: usize, value: f64) -> BoundaryPiece {
    BoundaryPiece {
        arc: Arc { edge, start, end },
        value,
    }
}

impl BoundarySpec {
    pub fn constant(nx: usize, ny: usize, value: f64) -> Self {
        Self {
            pieces: vec![
                piece(Edge::Bottom, 0, nx, value),
                piece(Edge::Top, 0, nx, value),
                piece(Edge::Left, 1, ny - 1, value),
                piece(Edge::Right, 1, ny - 1, value),
            ],
        }
    }

    /// Column of the marked boundary point on the bottom edge.
    pub fn origin_column(nx: usize) -> usize {
        nx / 2
    }

    /// Data of the fan: `-a` on the bottom edge left of the origin, `b` from
    /// the origin rightwards. The other sides carry the winding correction
    /// `χ·(turning angle)`: `b + χπ/2` on the right side, `b + χπ` on the top
    /// right of the origin column, `-a - χπ` on the top left and
    /// `-a - χπ/2` on the left side.
    pub fn fan(nx: usize, ny: usize, a: f64, b: f64, chi: f64) -> Self {
        let o = Self::origin_column(nx);
        let pi = std::f64::consts::PI;
        Self {
            pieces: vec![
                piece(Edge::Bottom, 0, o, -a),
                piece(Edge::Bottom, o, nx, b),
                piece(Edge::Right, 1, ny - 1, b + chi * pi / 2.0),
                piece(Edge::Top, o, nx, b + chi * pi),
                piece(Edge::Top, 0, o, -a - chi * pi),
                piece(Edge::Left, 1, ny - 1, -a - chi * pi / 2.0),
            ],
        }
    }

    /// One piece per boundary node with the value `f(x, y)`.
    pub fn from_fn(nx: usize, ny: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut pieces = Vec::new();
        for x in 0..nx {
            pieces.push(piece(Edge::Bottom, x, x + 1, f(x, 0)));
            pieces.push(piece(Edge::Top, x, x + 1, f(x, ny - 1)));
        }
        for y in 1..ny - 1 {
            pieces.push(piece(Edge::Left, y, y + 1, f(0, y)));
            pieces.push(piece(Edge::Right, y, y + 1, f(nx - 1, y)));
        }
        Self { pieces }
    }

    /// Full grid with boundary nodes filled in and interior nodes `NaN`.
    /// Fails unless the pieces cover every boundary node exactly once.
    pub fn boundary_grid(&self, nx: usize, ny: usize) -> Result<Vec<f64>> {
        check_dims(nx, ny)?;
        let mut grid = vec![f64::NAN; nx * ny];
        let mut hits = vec![0u8; nx * ny];
        for p in &self.pieces {
            let Arc { edge, start, end } = p.arc;
            if !p.value.is_finite() {
                return Err(Error::Config(format!("boundary value {} is not finite", p.value)));
            }
            let (lo, hi) = match edge {
                Edge::Bottom | Edge::Top => (0, nx),
                Edge::Left | Edge::Right => (1, ny - 1),
            };
            if start < lo || end > hi || start > end {
                return Err(Error::Config(format!(
                    "arc {edge:?} [{start}, {end}) outside the owned range [{lo}, {hi})"
                )));
            }
            for i in start..end {
                let idx = match edge {
                    Edge::Bottom => i,
                    Edge::Top => (ny - 1) * nx + i,
                    Edge::Left => i * nx,
                    Edge::Right => i * nx + nx - 1,
                };
                grid[idx] = p.value;
                hits[idx] += 1;
            }
        }
        for y in 0..ny {
            for x in 0..nx {
                let on_boundary = x == 0 || y == 0 || x == nx - 1 || y == ny - 1;
                let h = hits[y * nx + x];
                if on_boundary && h != 1 {
                    return Err(Error::Config(format!(
                        "boundary pieces cover node ({x}, {y}) {h} times; they must partition the boundary"
                    )));
                }
            }
        }
        Ok(grid)
    }
}

fn check_dims(nx: usize, ny: usize) -> Result<()> {
    if nx < 3 || ny < 3 {
        return Err(Error::param(format!("grid must be at least 3×3, got {nx}×{ny}")));
    }
    Ok(())
}

/// Field values on an `nx × ny` grid, `values[y * nx + x]`, `y = 0` bottom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeField {
    pub nx: usize,
    pub ny: usize,
    pub spacing: f64,
    pub values: Vec<f64>,
    pub boundary: BoundarySpec,
}

impl LatticeField {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.nx + x]
    }

    /// Bilinear interpolation at pixel coordinates, clamped to the grid.
    #[inline]
    pub fn bilinear(&self, x: f64, y: f64) -> f64 {
        let xm = (self.nx - 1) as f64;
        let ym = (self.ny - 1) as f64;
        let x = x.clamp(0.0, xm);
        let y = y.clamp(0.0, ym);
        let i = (x.floor() as usize).min(self.nx - 2);
        let j = (y.floor() as usize).min(self.ny - 2);
        let fx = x - i as f64;
        let fy = y - j as f64;
        let nx = self.nx;
        let v00 = self.values[j * nx + i];
        let v10 = self.values[j * nx + i + 1];
        let v01 = self.values[(j + 1) * nx + i];
        let v11 = self.values[(j + 1) * nx + i + 1];
        (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11)
    }

    /// The field shifted by `c`, boundary data included.
    pub fn add_constant(&self, c: f64) -> LatticeField {
        let mut out = self.clone();
        for v in &mut out.values {
            *v += c;
        }
        for p in &mut out.boundary.pieces {
            p.value += c;
        }
        out
    }

    /// Largest absolute residual of the 5-point Laplace equation over the
    /// interior.
    pub fn laplace_residual(&self) -> f64 {
        let nx = self.nx;
        let mut worst: f64 = 0.0;
        for y in 1..self.ny - 1 {
            for x in 1..nx - 1 {
                let i = y * nx + x;
                let r = 4.0 * self.values[i]
                    - self.values[i - 1]
                    - self.values[i + 1]
                    - self.values[i - nx]
                    - self.values[i + nx];
                worst = worst.max(r.abs());
            }
        }
        worst
    }
}

/// Solves `L u = rhs` on the `mx × my` interior with zero Dirichlet data
/// (`L` the combinatorial 5-point Laplacian) by diagonalising in the sine
/// basis.
fn dirichlet_solve(mx: usize, my: usize, rhs: &mut [f64]) {
    let lambda = laplacian_eigenvalues(mx, my);
    let mut dst = Dst2::new(mx, my);
    dst.apply(rhs);
    let norm2 = 4.0 / ((mx + 1) * (my + 1)) as f64;
    for (v, l) in rhs.iter_mut().zip(&lambda) {
        *v *= norm2 / l;
    }
    dst.apply(rhs);
}

/// Discrete harmonic function with the given Dirichlet data.
pub fn harmonic_extension(nx: usize, ny: usize, boundary: &BoundarySpec) -> Result<LatticeField> {
    let mut values = boundary.boundary_grid(nx, ny)?;
    let (mx, my) = (nx - 2, ny - 2);
    let mut rhs = vec![0.0; mx * my];
    for y in 1..ny - 1 {
        for x in 1..nx - 1 {
            let mut s = 0.0;
            if x == 1 {
                s += values[y * nx];
            }
            if x == nx - 2 {
                s += values[y * nx + nx - 1];
            }
            if y == 1 {
                s += values[x];
            }
            if y == ny - 2 {
                s += values[(ny - 1) * nx + x];
            }
            rhs[(y - 1) * mx + (x - 1)] = s;
        }
    }
    dirichlet_solve(mx, my, &mut rhs);
    for y in 1..ny - 1 {
        for x in 1..nx - 1 {
            values[y * nx + x] = rhs[(y - 1) * mx + (x - 1)];
        }
    }
    Ok(LatticeField {
        nx,
        ny,
        spacing: 1.0,
        values,
        boundary: boundary.clone(),
    })
}

/// Zero-boundary discrete GFF plus the harmonic extension of `boundary`.
///
/// The zero-boundary part has covariance `2π L⁻¹`: the Dirichlet inner
/// product `(1/2π)∫∇f·∇g` discretises to `(1/2π) fᵀLg`. It is sampled as
/// `Σ ξ_{jk} √(2π/λ_{jk}) e_{jk}` over the orthonormal sine eigenbasis.
pub fn sample_dgff<R: Rng + ?Sized>(nx: usize, ny: usize, boundary: &BoundarySpec, rng: &mut R) -> Result<LatticeField> {
    let mut field = harmonic_extension(nx, ny, boundary)?;
    let (mx, my) = (nx - 2, ny - 2);
    let lambda = laplacian_eigenvalues(mx, my);
    let norm = 2.0 / (((mx + 1) * (my + 1)) as f64).sqrt();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut coef: Vec<f64> = lambda
        .iter()
        .map(|l| {
            let z: f64 = rng.sample(StandardNormal);
            z * (two_pi / l).sqrt() * norm
        })
        .collect();
    Dst2::new(mx, my).apply(&mut coef);
    for y in 1..ny - 1 {
        for x in 1..nx - 1 {
            field.values[y * nx + x] += coef[(y - 1) * mx + (x - 1)];
        }
    }
    Ok(field)
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let half = (4.0 * sigma).ceil() as i64;
    let mut k: Vec<f64> = (-half..=half)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = k.iter().sum();
    for v in &mut k {
        *v /= s;
    }
    k
}

/// Mirror index into `[0, n)` without repeating the edge sample.
fn reflect(i: i64, n: usize) -> usize {
    let n = n as i64;
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let mut r = i.rem_euclid(period);
    if r >= n {
        r = period - r;
    }
    r as usize
}

/// Separable Gaussian blur with standard deviation `radius` pixels and
/// reflective padding. Boundary nodes are reset to their Dirichlet data.
pub fn smooth_field(field: &LatticeField, radius: f64) -> Result<LatticeField> {
    if !(radius >= 0.0) {
        return Err(Error::param(format!("smoothing radius must be nonnegative, got {radius}")));
    }
    if radius == 0.0 {
        return Ok(field.clone());
    }
    let k = gaussian_kernel(radius);
    let half = (k.len() / 2) as i64;
    let (nx, ny) = (field.nx, field.ny);
    let mut tmp = vec![0.0; nx * ny];
    for y in 0..ny {
        let row = &field.values[y * nx..(y + 1) * nx];
        for x in 0..nx {
            let mut s = 0.0;
            for (o, w) in k.iter().enumerate() {
                s += w * row[reflect(x as i64 + o as i64 - half, nx)];
            }
            tmp[y * nx + x] = s;
        }
    }
    let mut out = field.clone();
    for x in 0..nx {
        for y in 0..ny {
            let mut s = 0.0;
            for (o, w) in k.iter().enumerate() {
                s += w * tmp[reflect(y as i64 + o as i64 - half, ny) * nx + x];
            }
            out.values[y * nx + x] = s;
        }
    }
    if let Ok(bd) = field.boundary.boundary_grid(nx, ny) {
        for (v, b) in out.values.iter_mut().zip(bd) {
            if !b.is_nan() {
                *v = b;
            }
        }
    }
    Ok(out)
}
