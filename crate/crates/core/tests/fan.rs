mod common;

use fanlab_core::analysis::{
    component_brackets, hausdorff_distance, recover_flow_line, recovered_pixels, to_half_plane, Metric,
};
use fanlab_core::fan::{sample_fan, FanConfig, FanSet, ImaginaryGeometryParams};
use fanlab_core::geometry::right_region_mask;
use fanlab_core::gff::LatticeField;
use fanlab_core::raster::pixel_of;
use fanlab_core::stats::median;
use fanlab_core::topology::extract_components;
use fanlab_core::{stream, BitGrid, Termination};

const N: usize = 512;
const SEEDS: u64 = 20;

fn fan(seed: u64, n_angles: usize) -> (LatticeField, FanSet) {
    let p = ImaginaryGeometryParams::symmetric(1.0).unwrap();
    sample_fan(&p, N, N, -1.0, 1.0, n_angles, &FanConfig::default(), &mut stream(seed, "fan-test", 0, "fan")).unwrap()
}

fn trace_pixels(fs: &FanSet, k: usize) -> BitGrid {
    let mut g = BitGrid::new(N, N);
    for z in fs.traces[k].1.densified(0.25) {
        let (x, y) = pixel_of(z);
        g.set_checked(x, y);
    }
    g
}

fn near(g: &BitGrid, x: usize, y: usize, r: i64) -> bool {
    (-r..=r).any(|dy| {
        (-r..=r).any(|dx| {
            let (u, v) = (x as i64 + dx, y as i64 + dy);
            u >= 0 && v >= 0 && (u as usize) < g.nx && (v as usize) < g.ny && g.get(u as usize, v as usize)
        })
    })
}

#[test]
fn higher_angles_stay_left() {
    let mut crossing_fields = 0;
    for seed in 0..SEEDS {
        let (_, fs) = fan(seed, 9);
        let crossed = (1..fs.traces.len() - 1).any(|k| {
            let right = right_region_mask(&fs.traces[k].1.points, N, N);
            let own = trace_pixels(&fs, k);
            trace_pixels(&fs, k + 1).iter_set().any(|(x, y)| right.get(x, y) && !near(&own, x, y, 2))
        });
        if crossed {
            crossing_fields += 1;
        }
    }
    println!("fields with a crossing beyond 2 px: {crossing_fields}/{SEEDS}");
    assert!(crossing_fields as f64 <= 0.1 * SEEDS as f64);
}

#[test]
fn area_fraction_shrinks_with_resolution() {
    let p = ImaginaryGeometryParams::symmetric(1.0).unwrap();
    let frac: Vec<f64> = [128, 256, 512]
        .into_iter()
        .map(|n| {
            (0..8)
                .map(|seed| {
                    let (_, fs) =
                        sample_fan(&p, n, n, -1.0, 1.0, 9, &FanConfig::default(), &mut stream(seed, "fan-area", n as u64, "fan"))
                            .unwrap();
                    fs.raster.count() as f64 / (n * n) as f64
                })
                .sum::<f64>()
                / 8.0
        })
        .collect();
    println!("area fractions {frac:?}");
    assert!(frac[0] > frac[1] && frac[1] > frac[2]);
}

#[test]
fn flow_lines_do_not_trap() {
    let (mut traced, mut trapped) = (0, 0);
    for seed in 0..SEEDS {
        let (_, fs) = fan(seed, 9);
        for (_, tr) in &fs.traces {
            match tr.meta.termination {
                Termination::BoundarySegment => {}
                Termination::SelfTrap | Termination::MaxLength => {
                    traced += 1;
                    trapped += 1;
                }
                _ => traced += 1,
            }
        }
    }
    println!("trapped {trapped}/{traced}");
    assert!(1.0 - trapped as f64 / traced as f64 >= 0.9);
}

#[test]
fn first_angle_recovery_is_exact() {
    let mut exact = 0;
    for seed in 0..SEEDS {
        let (_, fs) = fan(seed, 9);
        let cm = extract_components(&fs.raster);
        let got = recovered_pixels(&fs, &cm, fs.angle_grid[0]).unwrap();
        let want = common::first_angle_oracle(&fs);
        println!("seed {seed}: {} pixels, hamming {}", want.count(), got.hamming(&want));
        if got == want {
            exact += 1;
        }
    }
    assert_eq!(exact, SEEDS);
}

#[test]
fn doubling_the_angles_barely_changes_the_raster() {
    for seed in 0..4 {
        let (_, coarse) = fan(seed, 9);
        let (_, fine) = fan(seed, 17);
        for k in 0..9 {
            assert_eq!(coarse.traces[k].1.points, fine.traces[2 * k].1.points);
        }
        let d = coarse.raster.hamming(&fine.raster) as f64 / (N * N) as f64;
        println!("seed {seed}: raster change {d:.5}");
        assert!(d < 0.01);
    }
}

#[test]
fn fixed_interior_pixel_is_rarely_hit() {
    // the half-plane point 0.5 + i at scale n/2
    let (x, y) = (N / 2 + N / 4, N / 2);
    let mut hits = 0;
    let seeds = 40;
    for seed in 0..seeds {
        if fan(seed, 9).1.raster.get(x, y) {
            hits += 1;
        }
    }
    println!("pixel hit {hits}/{seeds}");
    assert!((hits as f64) < 0.05 * seeds as f64);
}

#[test]
fn left_boundary_follows_the_last_line() {
    for seed in 0..SEEDS {
        let (_, fs) = fan(seed, 9);
        let cm = extract_components(&fs.raster);
        let bracket = component_brackets(&fs, &cm);
        let top = fs.traces.len() as i32 - 1;
        let last = trace_pixels(&fs, fs.traces.len() - 1);
        let mut boundary = BitGrid::new(N, N);
        for (x, y) in fs.raster.iter_set() {
            let i = y * N + x;
            let nb = [
                (x > 0).then(|| i - 1),
                (x + 1 < N).then(|| i + 1),
                (y > 0).then(|| i - N),
                (y + 1 < N).then(|| i + N),
            ];
            let on_left = nb.into_iter().flatten().any(|j| cm.labels[j] != 0 && bracket[cm.labels[j] as usize] == top);
            if on_left {
                boundary.set(x, y);
            }
        }
        let gap = |a: &BitGrid, b: &BitGrid| a.iter_set().map(|(x, y)| (0..=8).find(|&r| near(b, x, y, r)).unwrap_or(99)).max().unwrap_or(0);
        // the last line's pixels on the frame have no component beyond them
        let mut inner = BitGrid::new(N, N);
        for (x, y) in last.iter_set().filter(|&(x, y)| x > 0 && y > 0 && x + 1 < N && y + 1 < N) {
            inner.set(x, y);
        }
        let worst = gap(&boundary, &last).max(gap(&inner, &boundary));
        println!("seed {seed}: worst left-boundary gap {worst}");
        assert!(worst <= 2, "seed {seed}: gap {worst}");
    }
}

#[test]
fn more_angles_do_not_worsen_recovery() {
    let scale = N as f64 / 2.0;
    let mut err = [Vec::new(), Vec::new()];
    for seed in 0..SEEDS {
        for (slot, n_angles) in [9, 17].into_iter().enumerate() {
            let (_, fs) = fan(seed, n_angles);
            let cm = extract_components(&fs.raster);
            let mid = n_angles / 2;
            let rec = recover_flow_line(&fs, &cm, fs.angle_grid[mid]).unwrap();
            let a = to_half_plane(&rec.points, fs.origin, scale);
            let b = to_half_plane(&fs.traces[mid].1.densified(0.5), fs.origin, scale);
            err[slot].push(hausdorff_distance(&a, &b, Metric::Bounded).unwrap());
        }
    }
    let (m9, m17) = (median(&err[0]), median(&err[1]));
    println!("median bounded error: 9 angles {m9:.5}, 17 angles {m17:.5}");
    assert!(m17 <= m9);
}
