//! Planar helpers on the pixel grid: the region to the right of a curve
//! drawn from the bottom edge.

use num_complex::Complex64;

use crate::raster::BitGrid;

/// Position along the frame `[-1/2, nx-1/2] × [-1/2, ny-1/2]`, measured
/// clockwise from the bottom-left corner.
fn frame_param(z: Complex64, nx: f64, ny: f64) -> f64 {
    let (x, y) = (z.re + 0.5, z.im + 0.5);
    let d = [x, ny - y, nx - x, y];
    let side = (0..4).min_by(|&i, &j| d[i].total_cmp(&d[j])).unwrap_or(0);
    match side {
        0 => y.clamp(0.0, ny),
        1 => ny + x.clamp(0.0, nx),
        2 => ny + nx + (ny - y).clamp(0.0, ny),
        _ => 2.0 * ny + nx + (nx - x).clamp(0.0, nx),
    }
}

fn frame_point(s: f64, nx: f64, ny: f64) -> Complex64 {
    let p = if s < ny {
        (0.0, s)
    } else if s < ny + nx {
        (s - ny, ny)
    } else if s < 2.0 * ny + nx {
        (nx, 2.0 * ny + nx - s)
    } else {
        (2.0 * (ny + nx) - s, 0.0)
    };
    Complex64::new(p.0 - 0.5, p.1 - 0.5)
}

/// Pixels strictly to the right of a curve that starts on the bottom edge.
///
/// The region is the polygon: bottom frame below the first point, the
/// curve, the projection of its last point onto the frame, then the frame
/// clockwise back to the start. Pixel centres are filled by the even-odd
/// scanline rule, so self-crossing curves give a best-effort answer.
pub fn right_region_mask(points: &[Complex64], nx: usize, ny: usize) -> BitGrid {
    let mut grid = BitGrid::new(nx, ny);
    if points.len() < 2 {
        return grid;
    }
    let (fx, fy) = (nx as f64, ny as f64);
    let perimeter = 2.0 * (fx + fy);
    let start = Complex64::new(points[0].re, -0.5);
    let end = points[points.len() - 1];
    let s_start = frame_param(start, fx, fy);
    let s_end = frame_param(end, fx, fy);

    let mut poly = Vec::with_capacity(points.len() + 6);
    poly.push(start);
    poly.extend_from_slice(points);
    poly.push(frame_point(s_end, fx, fy));
    let span = (s_start - s_end).rem_euclid(perimeter);
    let mut corners: Vec<f64> = [0.0, fy, fy + fx, 2.0 * fy + fx]
        .into_iter()
        .map(|c| (c - s_end).rem_euclid(perimeter))
        .filter(|&d| d > 0.0 && d < span)
        .collect();
    corners.sort_by(f64::total_cmp);
    for d in corners {
        poly.push(frame_point((s_end + d).rem_euclid(perimeter), fx, fy));
    }

    let mut xs = Vec::new();
    for y in 0..ny {
        let yc = y as f64;
        xs.clear();
        for i in 0..poly.len() {
            let p = poly[i];
            let q = poly[(i + 1) % poly.len()];
            if (p.im > yc) != (q.im > yc) {
                xs.push(p.re + (yc - p.im) * (q.re - p.re) / (q.im - p.im));
            }
        }
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks_exact(2) {
            let lo = (pair[0].floor() + 1.0).max(0.0) as usize;
            let hi = (pair[1].ceil().min(fx)).max(0.0) as usize;
            for x in lo..hi {
                grid.set(x, y);
            }
        }
    }
    grid
}
