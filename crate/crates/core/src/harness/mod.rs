//! Configuration, seeding, experiment dispatch and output formats.

mod config;
mod experiments;
mod io;
mod report;

use std::time::Instant;

use rayon::prelude::*;
use serde_json::Value;

pub use config::{Experiment, ExperimentConfig, Knob};
pub use experiments::monotone_violations;
pub use io::{edge_list, field_binary, label_colour, read_field_binary, render_image, trace_csv, write_csv, Layers};
pub use report::{canonical_json, format_g12, read_report, write_report, Artifact, RunReport, SeedResult};

use crate::error::{Error, Result};

/// Version stamp written into every report.
pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Runs `config` on one thread. See [`run_experiment_threads`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    run_experiment_threads(config, 1)
}

/// Validates `config`, runs seeds `0..n_seeds` on a pool of `threads`
/// workers and aggregates. Seed `i` draws only from streams keyed by
/// `(base_seed, experiment, i, tag)`, so the report does not depend on the
/// thread count or on execution order.
pub fn run_experiment_threads(config: &ExperimentConfig, threads: usize) -> Result<RunReport> {
    config.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} worker threads: {e}")))?;
    let outputs: Vec<_> = pool.install(|| {
        (0..config.n_seeds as u64)
            .into_par_iter()
            .map(|i| experiments::run_seed(config, i))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut seeds = Vec::with_capacity(outputs.len());
    let mut artifacts = Vec::new();
    for (i, (result, art)) in outputs.into_iter().enumerate() {
        seeds.push(SeedResult { index: i as u64, result });
        artifacts.extend(art);
    }
    let results: Vec<Value> = seeds.iter().map(|s| s.result.clone()).collect();
    let aggregates = if results.is_empty() {
        Value::Null
    } else {
        experiments::aggregate(config, &results)?
    };
    Ok(RunReport {
        config: config.clone(),
        seeds,
        aggregates,
        wall_clock_s: start.elapsed().as_secs_f64(),
        version: VERSION.to_string(),
        artifacts,
    })
}

/// Result of a single seed, as it appears in a report.
pub fn run_seed(config: &ExperimentConfig, index: u64) -> Result<Value> {
    config.validate()?;
    Ok(experiments::run_seed(config, index)?.0)
}
