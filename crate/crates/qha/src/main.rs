use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qha::config::{Experiment, Format, RunConfig};
use qha::io::{read_text, write_bytes};
use qha::{experiments, RunError};

#[derive(Parser)]
#[command(name = "qha", version, about = "Quantum harmonic analysis experiments on sampled phase space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suite and print a pass/fail table
    Verify(Common),
    /// Schatten/Lebesgue ratio families per support radius
    Equivalence(Common),
    /// Restriction norms and duality identities on a measure
    Restriction(Common),
    /// Radius growth study with slope fits
    Growth(Common),
    /// Singular-value and annulus decay diagnostics
    Diagnostics(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; defaults apply when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(experiment: Experiment, args: Common) -> Result<(), RunError> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_json(&read_text(path)?)?,
        None => RunConfig { experiment, ..RunConfig::default() },
    };
    if cfg.experiment != experiment {
        return Err(RunError::Config {
            line: 1,
            field: "experiment".into(),
            reason: format!("config selects `{}` but the subcommand is `{}`", cfg.experiment.name(), experiment.name()),
        });
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(format) = args.format {
        cfg.output.format = format;
    }
    if let Some(out) = args.out {
        cfg.output.path = Some(out);
    }
    let report = experiments::run(&cfg, experiment)?;
    let text = report.render(cfg.output.format)?;
    match &cfg.output.path {
        Some(path) => write_bytes(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    if experiment == Experiment::Verify && cfg.output.path.is_some() {
        print!("{}", report.primary.to_text());
    }
    if report.passed() {
        Ok(())
    } else {
        Err(RunError::Tolerance(report.failures))
    }
}

fn main() -> ExitCode {
    qha::init_threads();
    let cli = Cli::parse();
    let (experiment, args) = match cli.command {
        Command::Verify(a) => (Experiment::Verify, a),
        Command::Equivalence(a) => (Experiment::Equivalence, a),
        Command::Restriction(a) => (Experiment::Restriction, a),
        Command::Growth(a) => (Experiment::Growth, a),
        Command::Diagnostics(a) => (Experiment::Diagnostics, a),
    };
    match execute(experiment, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qha {}: {e}", experiment.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
