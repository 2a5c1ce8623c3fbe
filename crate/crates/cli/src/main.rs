use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fanlab_core::harness::{canonical_json, run_experiment_threads, write_report, Experiment, ExperimentConfig};
use fanlab_core::Error;

#[derive(Parser)]
#[command(name = "fanlab", version, about = "Flow lines of the Gaussian free field, the SLE fan and its complement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON config laid over the experiment's defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for the report, CSV side files and images; stdout if absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of seeds (overrides the config)
    #[arg(long)]
    seeds: Option<usize>,
    /// Worker threads; results do not depend on this
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Override a field or knob, e.g. `--set kappa=2 --set rho=[-1,-1.9]`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Print the resolved config and exit
    #[arg(long)]
    dry_run: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Squared Bessel exact sampling: mean of Y_T and density mass
    BesselCheck(RunArgs),
    /// SLE_κ(ρ) driving functions from the Bessel and SDE constructions
    Drive(RunArgs),
    /// Loewner traces by the zipper
    Trace(RunArgs),
    /// Discrete GFF with fan boundary data
    Gff(RunArgs),
    /// The fan of flow lines over one field
    Fan(RunArgs),
    /// Complementary components of the fan
    Components(RunArgs),
    /// Connectivity of the component adjacency graph
    Connectivity(RunArgs),
    /// Recovery of the mid-angle flow line from the fan
    Recover(RunArgs),
    /// Box-counting dimension of SLE traces and of the fan
    Dims(RunArgs),
    /// Exit sides of the thin rectangle along a ρ ladder
    ExitSides(RunArgs),
    /// δ-closeness of two flow lines with nearby angles
    DeltaClose(RunArgs),
    /// Fans mapped by z ↦ -1/z against directly simulated fans
    Reversal(RunArgs),
    /// Coverage of the positive half-line along a θ ladder
    Coverage(RunArgs),
    /// List the experiments
    List,
}

fn resolve(experiment: Experiment, args: &RunArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text, Some(experiment))?
        }
        None => ExperimentConfig::defaults(experiment),
    };
    for s in &args.overrides {
        cfg.apply_set(s)?;
    }
    if let Some(n) = args.seeds {
        cfg.n_seeds = n;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = Some(out.display().to_string());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(experiment: Experiment, args: &RunArgs) -> Result<(), Error> {
    let cfg = resolve(experiment, args)?;
    if args.dry_run {
        println!("{}", canonical_json(&serde_json::to_value(&cfg)?));
        return Ok(());
    }
    let report = run_experiment_threads(&cfg, args.threads)?;
    match &args.out {
        Some(dir) => {
            let written = write_report(&report, &dir.join(format!("{experiment}.json")))?;
            for p in written {
                eprintln!("wrote {}", p.display());
            }
        }
        None => println!("{}", canonical_json(&serde_json::to_value(&report)?)),
    }
    eprintln!("{experiment}: {} seeds in {:.2} s", report.seeds.len(), report.wall_clock_s);
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parameter(_) | Error::Domain(_) | Error::Json(_) => 2,
        Error::Io(_) => 1,
        e if e.is_numeric() => 3,
        Error::AtAngle { source, .. } => exit_code(source),
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match &cli.command {
        Command::List => {
            for e in Experiment::ALL {
                println!("{e}");
            }
            return ExitCode::SUCCESS;
        }
        Command::BesselCheck(a) => (Experiment::BesselCheck, a),
        Command::Drive(a) => (Experiment::Drive, a),
        Command::Trace(a) => (Experiment::Trace, a),
        Command::Gff(a) => (Experiment::Gff, a),
        Command::Fan(a) => (Experiment::Fan, a),
        Command::Components(a) => (Experiment::Components, a),
        Command::Connectivity(a) => (Experiment::Connectivity, a),
        Command::Recover(a) => (Experiment::Recover, a),
        Command::Dims(a) => (Experiment::Dims, a),
        Command::ExitSides(a) => (Experiment::ExitSides, a),
        Command::DeltaClose(a) => (Experiment::DeltaClose, a),
        Command::Reversal(a) => (Experiment::Reversal, a),
        Command::Coverage(a) => (Experiment::Coverage, a),
    };
    match run(experiment, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_kind() {
        let numeric = Error::Numeric { step: 3, message: "overflow".into() };
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&numeric), 3);
        assert_eq!(exit_code(&Error::Swallowed { point: 1.0, time: 0.5 }), 3);
        assert_eq!(exit_code(&Error::AtAngle { angle: 0.1, source: Box::new(numeric) }), 3);
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("disk"))), 1);
    }
}
