use std::collections::VecDeque;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fan::FanSet;
use crate::geometry::right_region_mask;
use crate::raster::BitGrid;
use crate::topology::ComponentMap;
use crate::trace::{Termination, Trace, TraceMeta};

/// For each component label (index 0 unused), the index `m` of the traced
/// angle bracketing it from below: the component lies left of traces
/// `0..=m` and right of trace `m+1`. `-1` means right of every trace.
///
/// Sides are decided per trace by majority vote over the component's
/// pixels, then `m` is the length of the leading run of "left" verdicts
/// minus one.
pub fn component_brackets(fan: &FanSet, cm: &ComponentMap) -> Vec<i32> {
    let n = cm.n_components as usize;
    let sizes = cm.sizes();
    let mut left_run = vec![true; n + 1];
    let mut bracket = vec![fan.traces.len() as i32 - 1; n + 1];
    bracket[0] = i32::MIN;
    for (k, (_, tr)) in fan.traces.iter().enumerate() {
        let mask = right_region_mask(&tr.points, cm.nx, cm.ny);
        let mut right = vec![0usize; n + 1];
        for (i, &l) in cm.labels.iter().enumerate() {
            if l != 0 && mask.bits[i] {
                right[l as usize] += 1;
            }
        }
        for l in 1..=n {
            if left_run[l] && 2 * right[l] > sizes[l] {
                left_run[l] = false;
                bracket[l] = k as i32 - 1;
            }
        }
    }
    bracket
}

fn neighbours4(i: usize, nx: usize, ny: usize) -> impl Iterator<Item = usize> {
    let (x, y) = (i % nx, i / nx);
    [
        (x > 0).then(|| i - 1),
        (x + 1 < nx).then(|| i + 1),
        (y > 0).then(|| i - nx),
        (y + 1 < ny).then(|| i + nx),
    ]
    .into_iter()
    .flatten()
}

fn neighbours8(i: usize, nx: usize, ny: usize) -> impl Iterator<Item = usize> {
    let (x, y) = ((i % nx) as i64, (i / nx) as i64);
    (-1i64..=1)
        .flat_map(move |dy| (-1i64..=1).map(move |dx| (x + dx, y + dy)))
        .filter(move |&(u, v)| (u, v) != (x, y) && u >= 0 && v >= 0 && u < nx as i64 && v < ny as i64)
        .map(move |(u, v)| v as usize * nx + u as usize)
}

/// Pixels of the right boundary of `L_θ`, the union of components whose
/// lower bracketing angle is at least `θ`.
///
/// Fan pixels join the side of the nearest component (8-step distance
/// through the fan, ties to the left); when no traced angle lies below `θ`
/// the whole fan is on the left. The result is the fan pixels on the left
/// with a 4-neighbour on the right.
pub fn recovered_pixels(fan: &FanSet, cm: &ComponentMap, theta: f64) -> Result<BitGrid> {
    let grid = &fan.angle_grid;
    let (first, last) = (grid[0], grid[grid.len() - 1]);
    let slack = 1e-12 * (1.0 + first.abs().max(last.abs()));
    if !(theta >= first - slack && theta <= last + slack) {
        return Err(Error::param(format!("θ = {theta} is not bracketed by the angle grid [{first}, {last}]")));
    }
    let (nx, ny) = (cm.nx, cm.ny);
    let bracket = component_brackets(fan, cm);
    let is_left = |l: u32| {
        let m = bracket[l as usize];
        m >= 0 && grid[m as usize] >= theta - slack
    };
    // side per pixel: 1 left, 2 right, 0 unassigned fan pixel
    let mut side = vec![0u8; nx * ny];
    let mut queue = VecDeque::new();
    for pass in [1u8, 2] {
        for (i, &l) in cm.labels.iter().enumerate() {
            if l != 0 && (is_left(l) == (pass == 1)) {
                side[i] = pass;
                queue.push_back(i);
            }
        }
    }
    if theta <= first + slack {
        for (i, &l) in cm.labels.iter().enumerate() {
            if l == 0 {
                side[i] = 1;
            }
        }
    } else {
        while let Some(i) = queue.pop_front() {
            for j in neighbours8(i, nx, ny) {
                if side[j] == 0 {
                    side[j] = side[i];
                    queue.push_back(j);
                }
            }
        }
    }
    let mut out = BitGrid::new(nx, ny);
    for i in 0..nx * ny {
        if cm.labels[i] == 0 && side[i] == 1 && neighbours4(i, nx, ny).any(|j| side[j] == 2) {
            out.bits[i] = true;
        }
    }
    Ok(out)
}

/// Orders a pixel set into a polyline: breadth-first over 8-neighbours
/// from the pixel nearest `origin`, then any unreached pixels by distance.
pub fn pixels_to_trace(pixels: &BitGrid, origin: Complex64, theta: Option<f64>) -> Trace {
    let (nx, ny) = (pixels.nx, pixels.ny);
    let centre = |i: usize| Complex64::new((i % nx) as f64, (i / nx) as f64);
    let set: Vec<usize> = (0..nx * ny).filter(|&i| pixels.bits[i]).collect();
    let mut order = Vec::with_capacity(set.len());
    if let Some(&start) = set.iter().min_by(|&&a, &&b| (centre(a) - origin).norm().total_cmp(&(centre(b) - origin).norm())) {
        let mut seen = vec![false; nx * ny];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for j in neighbours8(i, nx, ny) {
                if pixels.bits[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        let mut rest: Vec<usize> = set.iter().copied().filter(|&i| !seen[i]).collect();
        rest.sort_by(|&a, &b| (centre(a) - origin).norm().total_cmp(&(centre(b) - origin).norm()));
        order.extend(rest);
    }
    let points: Vec<Complex64> = order.into_iter().map(centre).collect();
    Trace {
        times: (0..points.len()).map(|i| i as f64).collect(),
        points,
        meta: TraceMeta {
            origin,
            angle: theta,
            termination: Termination::Complete,
        },
    }
}

/// The angle-θ flow line read off the fan alone (plus which traced angles
/// bracket each component), as the right boundary of `L_θ`.
pub fn recover_flow_line(fan: &FanSet, cm: &ComponentMap, theta: f64) -> Result<Trace> {
    let px = recovered_pixels(fan, cm, theta)?;
    Ok(pixels_to_trace(&px, fan.origin, Some(theta)))
}

/// `(p - origin)/scale`: pixel coordinates to half-plane units.
pub fn to_half_plane(points: &[Complex64], origin: Complex64, scale: f64) -> Vec<Complex64> {
    points.iter().map(|&p| (p - origin) / scale).collect()
}
