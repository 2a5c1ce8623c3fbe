//! Oracles shared by the integration tests.

use std::collections::VecDeque;

use fanlab_core::fan::FanSet;
use fanlab_core::raster::{draw_polyline, BitGrid};

/// Right boundary of the region left of the θ₁ line: flood the complement
/// of that line's raster from the bottom edge right of the marked point and
/// keep the fan pixels with a flooded, non-fan 4-neighbour.
pub fn first_angle_oracle(fs: &FanSet) -> BitGrid {
    let (nx, ny) = (fs.nx(), fs.ny());
    let mut line = BitGrid::new(nx, ny);
    draw_polyline(&mut line, &fs.traces[0].1.points, 1);
    let mut right = vec![false; nx * ny];
    let mut queue = VecDeque::new();
    for x in fs.origin.re as usize + 1..nx {
        if !line.get(x, 0) {
            right[x] = true;
            queue.push_back(x);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = (i % nx, i / nx);
        let mut go = |j: usize| {
            if !right[j] && !line.bits[j] {
                right[j] = true;
                queue.push_back(j);
            }
        };
        if x > 0 {
            go(i - 1);
        }
        if x + 1 < nx {
            go(i + 1);
        }
        if y > 0 {
            go(i - nx);
        }
        if y + 1 < ny {
            go(i + nx);
        }
    }
    let mut out = BitGrid::new(nx, ny);
    for (x, y) in fs.raster.iter_set() {
        let i = y * nx + x;
        let nb = [
            (x > 0).then(|| i - 1),
            (x + 1 < nx).then(|| i + 1),
            (y > 0).then(|| i - nx),
            (y + 1 < ny).then(|| i + nx),
        ];
        if nb.into_iter().flatten().any(|j| right[j] && !fs.raster.bits[j]) {
            out.bits[i] = true;
        }
    }
    out
}
