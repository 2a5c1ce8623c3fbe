use num_complex::Complex64;
use serde_json::{json, Value};

use super::config::{Experiment, ExperimentConfig};
use super::io::{edge_list, field_binary, render_image, trace_csv, write_csv, Layers};
use super::report::Artifact;
use super::format_g12;
use crate::analysis::{
    box_dimension, coverage_level, coverage_run, delta_close_check, dyadic_scales, hausdorff_distance, mapped_setup,
    recover_flow_line, recovered_pixels, reversal_pair, reversal_report, to_half_plane, DimensionReport, FanSummary,
    Metric, Region,
};
use crate::bessel::{density_mass, sample_besq_on_grid, BesselParams};
use crate::error::Result;
use crate::fan::{rho_for_angle, sample_fan, FanConfig, FanSet};
use crate::gff::{sample_dgff, BoundarySpec};
use crate::loewner::{drive_sle, drive_sle_rho_bessel, loewner_trace, sample_exit_side, ExitSide, ForcePoint};
use crate::rng::{stream, StreamRng};
use crate::stats::{ks_two_sample, mean_se, median, proportion, MeanSe};
use crate::topology::{adjacency_graph, adjacency_graph_with, chain_between, extract_components, is_connected, verify_chain};
use crate::trace::{count_self_crossings, Termination};

pub(crate) type SeedOutput = (Value, Vec<Artifact>);

fn rng(cfg: &ExperimentConfig, seed: u64, tag: &str) -> StreamRng {
    stream(cfg.base_seed, cfg.experiment.as_str(), seed, tag)
}

fn ms(m: MeanSe) -> Value {
    json!({"mean": m.mean, "se": m.se, "n": m.n})
}

fn numbers(results: &[Value], key: &str) -> Vec<f64> {
    results.iter().filter_map(|r| r[key].as_f64()).collect()
}

fn flags(results: &[Value], key: &str) -> Vec<bool> {
    results.iter().filter_map(|r| r[key].as_bool()).collect()
}

fn rate(v: &[bool]) -> Value {
    ms(proportion(v.iter().filter(|&&b| b).count(), v.len()))
}

fn want_artifacts(cfg: &ExperimentConfig, seed: u64) -> bool {
    (seed as usize) < cfg.artifact_seeds
}

fn name(cfg: &ExperimentConfig, seed: u64, what: &str, ext: &str) -> String {
    format!("{}_{what}_{seed}.{ext}", cfg.experiment.as_str())
}

fn fan_for(cfg: &ExperimentConfig, seed: u64, theta1: f64, theta2: f64, n_angles: usize) -> Result<(crate::gff::LatticeField, FanSet)> {
    let p = cfg.params()?;
    sample_fan(&p, cfg.nx, cfg.ny, theta1, theta2, n_angles, &FanConfig::default(), &mut rng(cfg, seed, "fan"))
}

fn fan_default(cfg: &ExperimentConfig, seed: u64) -> Result<(crate::gff::LatticeField, FanSet)> {
    fan_for(cfg, seed, cfg.num("theta1")?, cfg.num("theta2")?, cfg.n_angles)
}

fn terminations(fan: &FanSet) -> Value {
    let mut counts = std::collections::BTreeMap::<String, usize>::new();
    for (_, tr) in &fan.traces {
        let key = match tr.meta.termination {
            Termination::Boundary => "boundary",
            Termination::MaxLength => "max_length",
            Termination::SelfTrap => "self_trap",
            Termination::BoundarySegment => "boundary_segment",
            Termination::Threshold => "threshold",
            Termination::Complete => "complete",
        };
        *counts.entry(key.into()).or_default() += 1;
    }
    json!(counts)
}

pub(crate) fn run_seed(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    match cfg.experiment {
        Experiment::BesselCheck => bessel_check(cfg, seed),
        Experiment::Drive => drive(cfg, seed),
        Experiment::Trace => trace(cfg, seed),
        Experiment::Gff => gff(cfg, seed),
        Experiment::Fan => fan(cfg, seed),
        Experiment::Components => components(cfg, seed),
        Experiment::Connectivity => connectivity(cfg, seed),
        Experiment::Recover => recover(cfg, seed),
        Experiment::Dims => dims(cfg, seed),
        Experiment::ExitSides => exit_sides(cfg, seed),
        Experiment::DeltaClose => delta_close(cfg, seed),
        Experiment::Reversal => reversal(cfg, seed),
        Experiment::Coverage => coverage(cfg, seed),
    }
}

fn bessel_check(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let (delta, t, y0, paths) = (cfg.num("delta")?, cfg.num("t")?, cfg.num("y0")?, cfg.count("paths")?);
    let mut r = rng(cfg, seed, "besq");
    let ys: Vec<f64> = (0..paths).map(|_| sample_besq_on_grid(delta, y0, &[0.0, t], &mut r)[1]).collect();
    let m = mean_se(&ys);
    Ok((json!({"mean_y": m.mean, "se_y": m.se, "paths": paths}), Vec::new()))
}

fn drive(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let (rho, t_end) = (cfg.num("rho")?, cfg.num("t_end")?);
    let bes = drive_sle_rho_bessel(cfg.kappa, rho, t_end, cfg.dt, &mut rng(cfg, seed, "bessel"))?;
    let sde = drive_sle(cfg.kappa, &[ForcePoint::right(0.0, rho)], t_end, cfg.dt, &mut rng(cfg, seed, "sde"))?;
    let last = |v: &[f64]| *v.last().expect("paths are nonempty");
    Ok((
        json!({
            "w_bessel": last(&bes.w),
            "v_bessel": last(&bes.v[0]),
            "w_sde": last(&sde.w),
            "v_sde": last(&sde.v[0]),
            "floored_steps": bes.floored_steps,
        }),
        Vec::new(),
    ))
}

fn trace(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let (rho, t_end) = (cfg.num("rho")?, cfg.num("t_end")?);
    let fp = if rho == 0.0 { vec![] } else { vec![ForcePoint::right(0.0, rho)] };
    let path = drive_sle(cfg.kappa, &fp, t_end, cfg.dt, &mut rng(cfg, seed, "drive"))?;
    let tr = loewner_trace(&path)?;
    let tip = tr.last();
    let max_height = tr.points.iter().map(|z| z.im).fold(0.0, f64::max);
    let mut art = Vec::new();
    if want_artifacts(cfg, seed) {
        art.push(Artifact {
            name: name(cfg, seed, "trace", "csv"),
            bytes: trace_csv(&tr)?,
        });
    }
    Ok((
        json!({
            "points": tr.len(),
            "tip_re": tip.re,
            "tip_im": tip.im,
            "max_height": max_height,
            "self_crossings": count_self_crossings(&tr.points, 3),
            "threshold_time": path.threshold_time,
        }),
        art,
    ))
}

fn gff(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let p = cfg.params()?;
    let bd = BoundarySpec::fan(cfg.nx, cfg.ny, p.a, p.b, p.chi);
    let f = sample_dgff(cfg.nx, cfg.ny, &bd, &mut rng(cfg, seed, "fan"))?;
    let m = mean_se(&f.values);
    let (cx, cy) = (cfg.nx / 2, cfg.ny / 2);
    let mut art = Vec::new();
    if want_artifacts(cfg, seed) {
        art.push(Artifact {
            name: name(cfg, seed, "field", "bin"),
            bytes: field_binary(&f),
        });
        art.push(Artifact {
            name: name(cfg, seed, "field", "ppm"),
            bytes: render_image(f.nx, f.ny, Layers { field: Some(&f), ..Layers::default() })?,
        });
    }
    let var = m.se * m.se * m.n as f64;
    Ok((json!({"mean": m.mean, "variance": var, "centre": f.get(cx, cy)}), art))
}

fn fan(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let (field, fan) = fan_default(cfg, seed)?;
    let mut art = Vec::new();
    if want_artifacts(cfg, seed) {
        art.push(Artifact {
            name: name(cfg, seed, "fan", "ppm"),
            bytes: render_image(cfg.nx, cfg.ny, Layers { field: Some(&field), fan: Some(&fan.raster), ..Layers::default() })?,
        });
    }
    let lengths: Vec<f64> = fan.traces.iter().map(|(_, t)| t.arc_length()).collect();
    Ok((
        json!({
            "fan_pixels": fan.raster.count(),
            "clipped": fan.clipped,
            "terminations": terminations(&fan),
            "arc_lengths": lengths,
        }),
        art,
    ))
}

fn components(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let (_, fan) = fan_default(cfg, seed)?;
    let cm = extract_components(&fan.raster);
    let sizes = cm.sizes();
    let mut art = Vec::new();
    if want_artifacts(cfg, seed) {
        art.push(Artifact {
            name: name(cfg, seed, "components", "ppm"),
            bytes: render_image(cfg.nx, cfg.ny, Layers { labels: Some(&cm.labels), fan: Some(&fan.raster), ..Layers::default() })?,
        });
    }
    Ok((
        json!({
            "components": cm.n_components,
            "largest": sizes.iter().skip(1).max().copied().unwrap_or(0),
            "singletons": sizes.iter().skip(1).filter(|&&s| s == 1).count(),
            "touching_frame": cm.touching_frame().len(),
        }),
        art,
    ))
}

fn connectivity(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let (_, fan) = fan_default(cfg, seed)?;
    let cm = extract_components(&fan.raster);
    let g = adjacency_graph(&cm, 1);
    let (connected, classes) = is_connected(&g);
    // witness chain between the two largest components
    let sizes = cm.sizes();
    let mut order: Vec<u32> = (1..=cm.n_components).collect();
    order.sort_by_key(|&l| std::cmp::Reverse(sizes[l as usize]));
    let chain_ok = match order.as_slice() {
        [u, v, ..] => match chain_between(&g, *u, *v)? {
            Some(c) => verify_chain(&g, &c),
            None => false,
        },
        _ => true,
    };
    let (wide, _) = is_connected(&adjacency_graph_with(&cm, 1, 2, |_, _| true));
    let mut art = Vec::new();
    if want_artifacts(cfg, seed) {
        art.push(Artifact {
            name: name(cfg, seed, "edges", "csv"),
            bytes: edge_list(&g)?,
        });
    }
    Ok((
        json!({
            "connected": connected,
            "graph_components": classes,
            "components": cm.n_components,
            "edges": g.edges.len(),
            "chain_verified": chain_ok,
            "connected_reach2": wide,
        }),
        art,
    ))
}

fn recover(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let (_, fan) = fan_default(cfg, seed)?;
    let cm = extract_components(&fan.raster);
    let mid = fan.angle_grid.len() / 2;
    let (theta, truth) = (&fan.traces[mid].0, &fan.traces[mid].1);
    let rec = recover_flow_line(&fan, &cm, *theta)?;
    let scale = cfg.nx.min(cfg.ny) as f64 / 2.0;
    let tol_px = cfg.num("tolerance_px")?;
    let d = if rec.is_empty() {
        f64::INFINITY
    } else {
        let a = to_half_plane(&rec.points, fan.origin, scale);
        let b = to_half_plane(&truth.densified(0.5), fan.origin, scale);
        hausdorff_distance(&a, &b, Metric::Bounded)?
    };
    // |φ'| = 2 at the marked point, so n px there is 2n/scale
    let threshold = 2.0 * tol_px / scale;
    let first = recovered_pixels(&fan, &cm, fan.angle_grid[0])?;
    let mut art = Vec::new();
    if want_artifacts(cfg, seed) {
        art.push(Artifact {
            name: name(cfg, seed, "recovered", "csv"),
            bytes: trace_csv(&rec)?,
        });
    }
    Ok((
        json!({
            "theta": theta,
            "hausdorff_bounded": d,
            "threshold": threshold,
            "recovered": d <= threshold,
            "first_angle_pixels": first.count(),
        }),
        art,
    ))
}

fn dims(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let n_scales = cfg.count("scales")?;
    let path = drive_sle(cfg.num("sle_kappa")?, &[], cfg.num("sle_t_end")?, cfg.dt, &mut rng(cfg, seed, "sle"))?;
    let tr = loewner_trace(&path)?;
    let ext = tr.points.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sle = box_dimension(&tr.densified(ext / 4000.0), &dyadic_scales(ext / 4.0, n_scales))?;
    let (_, fan) = fan_default(cfg, seed)?;
    let pts: Vec<Complex64> = fan.traces.iter().flat_map(|(_, t)| t.densified(0.25)).collect();
    let size = cfg.nx.min(cfg.ny) as f64;
    let fan_dim = box_dimension(&pts, &dyadic_scales(size / 4.0, n_scales))?;
    let mut art = Vec::new();
    if want_artifacts(cfg, seed) {
        let mut rows = Vec::new();
        let mut push = |kind: &str, r: &DimensionReport| {
            for (s, c) in r.scales.iter().zip(&r.counts) {
                rows.push(vec![kind.to_string(), format_g12(*s), c.to_string()]);
            }
        };
        push("sle", &sle);
        push("fan", &fan_dim);
        art.push(Artifact {
            name: name(cfg, seed, "boxes", "csv"),
            bytes: write_csv(&["curve", "scale", "count"], &rows)?,
        });
    }
    Ok((json!({"sle_slope": sle.slope, "sle_r2": sle.r2, "fan_slope": fan_dim.slope, "fan_r2": fan_dim.r2}), art))
}

fn side_name(s: Option<ExitSide>) -> &'static str {
    match s {
        Some(ExitSide::Left) => "left",
        Some(ExitSide::Top) => "top",
        Some(ExitSide::Right) => "right",
        None => "none",
    }
}

fn exit_sides(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let (eps, t_max) = (cfg.num("epsilon")?, cfg.num("t_max")?);
    let mut sides = Vec::new();
    for (k, rho) in cfg.list("rho")?.into_iter().enumerate() {
        let mut r = stream(cfg.base_seed, cfg.experiment.as_str(), seed, &format!("level{k}"));
        sides.push(side_name(sample_exit_side(cfg.kappa, rho, eps, cfg.dt, t_max, &mut r)?));
    }
    Ok((json!({ "sides": sides }), Vec::new()))
}

fn delta_close(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let theta = cfg.num("theta")?;
    let (_, fan) = fan_for(cfg, seed, 0.0, theta, 2)?;
    let (eta0, eta) = (&fan.traces[0].1, &fan.traces[1].1);
    let r = cfg.nx.min(cfg.ny) as f64 / 4.0;
    let region = Region::Disk { center: fan.origin, radius: r };
    let close = delta_close_check(eta0, eta, &region, cfg.num("delta_px")?)?;
    Ok((json!({"close": close}), Vec::new()))
}

fn summary(s: &FanSummary) -> Value {
    json!({"area_fraction": s.area_fraction, "components": s.components, "connected": s.connected})
}

fn reversal(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let p = cfg.params()?;
    let (m, d) = reversal_pair(
        &p,
        cfg.num("theta1")?,
        cfg.num("theta2")?,
        cfg.n_angles,
        cfg.nx,
        &FanConfig::default(),
        &mut rng(cfg, seed, "fan"),
    )?;
    Ok((json!({"mapped": summary(&m), "direct": summary(&d)}), Vec::new()))
}

fn coverage(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let p = cfg.params()?;
    let (r, d0, t_end) = (cfg.num("r")?, cfg.num("delta0")?, cfg.num("t_end")?);
    let mut levels = Vec::new();
    for (k, rho2) in cfg.list("rho2")?.into_iter().enumerate() {
        let theta = rho2 * p.b / p.chi;
        let (rho1, rho2) = rho_for_angle(&p, theta)?;
        let mut g = stream(cfg.base_seed, cfg.experiment.as_str(), seed, &format!("level{k}"));
        let (covered, hd) = coverage_run(p.kappa, rho1, rho2, r, d0, t_end, cfg.dt, &mut g)?;
        levels.push(json!({"theta": theta, "rho1": rho1, "rho2": rho2, "covered": covered, "hausdorff": hd}));
    }
    Ok((json!({ "levels": levels }), Vec::new()))
}

/// Statistics over the per-seed results (at least one).
pub(crate) fn aggregate(cfg: &ExperimentConfig, results: &[Value]) -> Result<Value> {
    Ok(match cfg.experiment {
        Experiment::BesselCheck => {
            let (delta, t, y0) = (cfg.num("delta")?, cfg.num("t")?, cfg.num("y0")?);
            let m = mean_se(&numbers(results, "mean_y"));
            let expected = y0 + delta * t;
            let params = BesselParams::new(delta)?;
            json!({
                "mean_y": ms(m),
                "expected": expected,
                "z": m.z_score(expected),
                "density_mass": density_mass(&params, t, y0.sqrt(), 20_000)?,
            })
        }
        Experiment::Drive => {
            let (a, b) = (numbers(results, "w_bessel"), numbers(results, "w_sde"));
            let ks = ks_two_sample(&a, &b);
            json!({"w_bessel": ms(mean_se(&a)), "w_sde": ms(mean_se(&b)), "ks_statistic": ks.statistic, "ks_p": ks.p_value})
        }
        Experiment::Trace => json!({
            "max_height": ms(mean_se(&numbers(results, "max_height"))),
            "self_crossings": ms(mean_se(&numbers(results, "self_crossings"))),
        }),
        Experiment::Gff => json!({
            "variance": ms(mean_se(&numbers(results, "variance"))),
            "centre": ms(mean_se(&numbers(results, "centre"))),
        }),
        Experiment::Fan => json!({
            "fan_pixels": ms(mean_se(&numbers(results, "fan_pixels"))),
            "clipped": ms(mean_se(&numbers(results, "clipped"))),
        }),
        Experiment::Components => json!({
            "components": ms(mean_se(&numbers(results, "components"))),
            "largest": ms(mean_se(&numbers(results, "largest"))),
        }),
        Experiment::Connectivity => json!({
            "connected_rate": rate(&flags(results, "connected")),
            "chain_verified_rate": rate(&flags(results, "chain_verified")),
            "connected_reach2_rate": rate(&flags(results, "connected_reach2")),
        }),
        Experiment::Recover => json!({
            "recovered_rate": rate(&flags(results, "recovered")),
            "hausdorff_median": median(&numbers(results, "hausdorff_bounded")),
        }),
        Experiment::Dims => json!({
            "sle_slope": ms(mean_se(&numbers(results, "sle_slope"))),
            "fan_slope": ms(mean_se(&numbers(results, "fan_slope"))),
            "sle_expected": 1.0 + cfg.num("sle_kappa")? / 8.0,
            "fan_expected": 1.0 + cfg.kappa / 8.0,
        }),
        Experiment::ExitSides => {
            let rhos = cfg.list("rho")?;
            let mut levels = Vec::new();
            let mut rights = Vec::new();
            for (k, rho) in rhos.iter().enumerate() {
                let sides: Vec<&str> = results.iter().filter_map(|r| r["sides"][k].as_str()).collect();
                let classified = sides.iter().filter(|s| **s != "none").count();
                let count = |name: &str| sides.iter().filter(|s| **s == name).count();
                let right = proportion(count("right"), classified);
                rights.push(right);
                levels.push(json!({
                    "rho": rho,
                    "left": ms(proportion(count("left"), classified)),
                    "top": ms(proportion(count("top"), classified)),
                    "right": ms(right),
                    "unclassified": count("none"),
                }));
            }
            json!({"levels": levels, "violations_2se": monotone_violations(&rights)})
        }
        Experiment::DeltaClose => json!({"close_rate": rate(&flags(results, "close"))}),
        Experiment::Reversal => {
            let parse = |key: &str| -> Vec<FanSummary> {
                results
                    .iter()
                    .map(|r| FanSummary {
                        area_fraction: r[key]["area_fraction"].as_f64().unwrap_or(f64::NAN),
                        components: r[key]["components"].as_u64().unwrap_or(0) as usize,
                        connected: r[key]["connected"].as_bool().unwrap_or(false),
                    })
                    .collect()
            };
            let (_, range) = mapped_setup(&cfg.params()?, cfg.num("theta1")?, cfg.num("theta2")?)?;
            let rep = reversal_report(parse("mapped"), parse("direct"), range);
            json!({
                "components_ks_p": rep.components_ks.p_value,
                "components_ks_statistic": rep.components_ks.statistic,
                "area_ks_p": rep.area_ks.p_value,
                "mapped_connectivity": rep.mapped_connectivity,
                "direct_connectivity": rep.direct_connectivity,
                "mapped_range": [range.0, range.1],
            })
        }
        Experiment::Coverage => {
            let n_levels = cfg.list("rho2")?.len();
            let mut levels = Vec::new();
            let mut medians = Vec::new();
            for k in 0..n_levels {
                let rows: Vec<&Value> = results.iter().map(|r| &r["levels"][k]).collect();
                let runs: Vec<(bool, f64)> = rows
                    .iter()
                    .map(|l| (l["covered"].as_bool().unwrap_or(false), l["hausdorff"].as_f64().unwrap_or(f64::NAN)))
                    .collect();
                let f = |key: &str| rows[0][key].as_f64().unwrap_or(f64::NAN);
                let lvl = coverage_level(f("theta"), f("rho1"), f("rho2"), &runs);
                medians.push(lvl.hausdorff_median);
                levels.push(json!({
                    "theta": lvl.theta,
                    "rho1": lvl.rho1,
                    "rho2": lvl.rho2,
                    "coverage": ms(lvl.coverage),
                    "hausdorff_median": lvl.hausdorff_median,
                }));
            }
            let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
            json!({"levels": levels, "median_strictly_decreasing": decreasing})
        }
    })
}

/// Steps along the ladder where the frequency drops by more than two
/// combined standard errors.
pub fn monotone_violations(levels: &[MeanSe]) -> usize {
    levels
        .windows(2)
        .filter(|w| {
            let se = (w[0].se * w[0].se + w[1].se * w[1].se).sqrt();
            w[1].mean < w[0].mean - 2.0 * se
        })
        .count()
}
