//! Boolean rasters and polyline rasterization.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Row-major bit grid, `bits[y * nx + x]`, `y = 0` the bottom row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitGrid {
    pub nx: usize,
    pub ny: usize,
    pub bits: Vec<bool>,
}

impl BitGrid {
    pub fn new(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            bits: vec![false; nx * ny],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.nx + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize) {
        self.bits[y * self.nx + x] = true;
    }

    /// Sets `(x, y)` if it lies in the grid; returns whether it did.
    #[inline]
    pub fn set_checked(&mut self, x: i64, y: i64) -> bool {
        if x >= 0 && y >= 0 && (x as usize) < self.nx && (y as usize) < self.ny {
            self.set(x as usize, y as usize);
            true
        } else {
            false
        }
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// In-place union with a grid of the same shape.
    pub fn union_with(&mut self, other: &BitGrid) {
        assert_eq!((self.nx, self.ny), (other.nx, other.ny), "raster shapes differ");
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    /// Number of cells where the grids differ.
    pub fn hamming(&self, other: &BitGrid) -> usize {
        assert_eq!((self.nx, self.ny), (other.nx, other.ny), "raster shapes differ");
        self.bits.iter().zip(&other.bits).filter(|(a, b)| a != b).count()
    }

    pub fn iter_set(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nx = self.nx;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % nx, i / nx))
    }
}

/// Pixels of the digital segment between two lattice points (both ends
/// included). Consecutive pixels are 8-adjacent.
pub fn bresenham(x0: i64, y0: i64, x1: i64, y1: i64, mut visit: impl FnMut(i64, i64)) {
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let (mut x, mut y) = (x0, y0);
    let mut err = dx + dy;
    loop {
        visit(x, y);
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Nearest lattice point; pixel `(x, y)` covers `[x-1/2, x+1/2) × [y-1/2, y+1/2)`.
#[inline]
pub fn pixel_of(z: Complex64) -> (i64, i64) {
    ((z.re + 0.5).floor() as i64, (z.im + 0.5).floor() as i64)
}

/// Draws a polyline into `grid` with square brushes of side `thickness`
/// (odd widths centre on the line). Returns the number of pixels that fell
/// outside the grid and were dropped.
pub fn draw_polyline(grid: &mut BitGrid, points: &[Complex64], thickness: usize) -> usize {
    let thickness = thickness.max(1) as i64;
    let lo = -(thickness - 1) / 2;
    let hi = thickness / 2;
    let mut clipped = 0usize;
    let mut stamp = |x: i64, y: i64, grid: &mut BitGrid| {
        for ox in lo..=hi {
            for oy in lo..=hi {
                if !grid.set_checked(x + ox, y + oy) {
                    clipped += 1;
                }
            }
        }
    };
    if points.len() == 1 {
        let (x, y) = pixel_of(points[0]);
        stamp(x, y, grid);
        return clipped;
    }
    let mut prev: Option<(i64, i64)> = None;
    for w in points.windows(2) {
        let (x0, y0) = pixel_of(w[0]);
        let (x1, y1) = pixel_of(w[1]);
        bresenham(x0, y0, x1, y1, |x, y| {
            // segment joints repeat the shared endpoint; count it once
            if prev != Some((x, y)) {
                stamp(x, y, grid);
            }
            prev = Some((x, y));
        });
    }
    clipped
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bresenham_counts_and_connectivity() {
        let mut n = 0;
        bresenham(0, 0, 10, 0, |_, _| n += 1);
        assert_eq!(n, 11);
        // every small segment is an 8-connected chain with no repeats
        for x1 in -6..=6 {
            for y1 in -6..=6 {
                let mut pts = Vec::new();
                bresenham(0, 0, x1, y1, |x, y| pts.push((x, y)));
                assert_eq!(pts[0], (0, 0));
                assert_eq!(*pts.last().unwrap(), (x1, y1));
                assert_eq!(pts.len() as i64, x1.abs().max(y1.abs()) + 1);
                for w in pts.windows(2) {
                    let (dx, dy) = ((w[1].0 - w[0].0).abs(), (w[1].1 - w[0].1).abs());
                    assert!(dx <= 1 && dy <= 1 && dx + dy > 0);
                }
            }
        }
    }

    #[test]
    fn clipping_is_counted() {
        let mut g = BitGrid::new(4, 4);
        let pts = [Complex64::new(-2.0, 1.0), Complex64::new(2.0, 1.0)];
        let clipped = draw_polyline(&mut g, &pts, 1);
        assert_eq!(clipped, 2);
        assert_eq!(g.count(), 3);
    }
}
