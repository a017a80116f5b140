//! Command-line experiments on engineered transfer lattices.
//!
//! A run reads a JSON config, applies `--set key=value` overrides, validates
//! every field, runs one experiment and writes a deterministic record as CSV
//! or JSON.

pub mod config;
pub mod error;
pub mod experiments;
pub mod record;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::{Experiment, Format};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "pft", version, about = "Perfect-transfer lattice experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Engineered hopping amplitudes J*sqrt(j(M-j))/2 along every axis.
    Couplings(RunArgs),
    /// Single-particle amplitudes over the lattice at one time.
    Evolve(RunArgs),
    /// Transfer fidelity of a particle or a function at one time.
    Fidelity(RunArgs),
    /// Source-to-target fidelity over a time grid.
    Sweep(RunArgs),
    /// Mirror fidelity under seeded coupling noise.
    Disorder(RunArgs),
    /// Transfer under a dressed Hamiltonian W H W^dagger.
    Dressing(RunArgs),
    /// The full acceptance suite; exit code 3 if any criterion fails.
    Verify(RunArgs),
}

impl Command {
    pub fn split(&self) -> (Experiment, &RunArgs) {
        match self {
            Command::Couplings(a) => (Experiment::Couplings, a),
            Command::Evolve(a) => (Experiment::Evolve, a),
            Command::Fidelity(a) => (Experiment::Fidelity, a),
            Command::Sweep(a) => (Experiment::Sweep, a),
            Command::Disorder(a) => (Experiment::Disorder, a),
            Command::Dressing(a) => (Experiment::Dressing, a),
            Command::Verify(a) => (Experiment::Verify, a),
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one config field; the value is JSON or a bare string.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

/// Runs one command. The record is written before a failed verify is reported.
pub fn execute(command: &Command) -> CliResult<()> {
    let (experiment, args) = command.split();
    let start = Instant::now();
    let mut value = config::load(args.config.as_deref())?;
    for s in &args.set {
        config::apply_override(&mut value, s)?;
    }
    let mut cfg = config::parse(value)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(f) = args.format {
        cfg.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.display().to_string());
    }
    let resolved = config::resolve(&cfg, experiment)?;
    cfg.experiment = Some(experiment);
    let hash = config::config_hash(&cfg);

    let outcome = experiments::run(&resolved, hash)?;
    outcome
        .record
        .emit(cfg.format, cfg.out.as_deref().map(std::path::Path::new))?;
    eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    if !outcome.passed {
        return Err(CliError::VerifyFailed(format!(
            "{}: one or more criteria failed",
            experiment.name()
        )));
    }
    Ok(())
}
