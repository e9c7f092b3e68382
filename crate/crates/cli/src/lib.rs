//! Command-line driver for the `qcad` toolkit: TOML run configs, the
//! `spectrum`, `encode`, `vqd`, `gate` and `resources` commands, and
//! deterministic CSV/JSON outputs with a per-run manifest.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use commands::GateKind;
use config::RunConfig;
use output::Manifest;

#[derive(Debug, Parser)]
#[command(name = "qcad", version, about = "Transmon device design by digital quantum simulation")]
pub struct Cli {
    /// TOML run configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the variational and dynamics sections.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Enable long runs such as the d=16 CPHASE Trotter scan.
    #[arg(long, global = true)]
    pub full: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact eigenvalues against flux.
    Spectrum,
    /// Pauli listings of the configured operators for each scheme.
    Encode,
    /// Variational spectrum against flux.
    Vqd,
    /// Gate simulation with fidelity and Trotter scan.
    Gate {
        #[arg(value_enum)]
        kind: GateArg,
    },
    /// Closed-form and constructive ansatz gate counts.
    Resources,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GateArg {
    Bitflip,
    Cphase,
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Self::Spectrum => "spectrum".into(),
            Self::Encode => "encode".into(),
            Self::Vqd => "vqd".into(),
            Self::Gate { kind: GateArg::Bitflip } => "gate bitflip".into(),
            Self::Gate { kind: GateArg::Cphase } => "gate cphase".into(),
            Self::Resources => "resources".into(),
        }
    }
}

/// Loads the config and applies the command-line overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.variational.seed = seed;
        cfg.dynamics.seed = seed;
    }
    Ok(cfg.resolved()?)
}

/// Runs one command to completion, writing its outputs and manifest.
pub fn run(cli: &Cli) -> Result<Manifest> {
    let cfg = resolve_config(cli)?;
    let start = Instant::now();
    let exec = || -> Result<output::OutputSet> {
        match &cli.command {
            Command::Spectrum => commands::spectrum(&cfg),
            Command::Encode => commands::encode(&cfg),
            Command::Vqd => commands::vqd(&cfg),
            Command::Gate { kind: GateArg::Bitflip } => commands::gate(&cfg, GateKind::Bitflip, cli.full),
            Command::Gate { kind: GateArg::Cphase } => commands::gate(&cfg, GateKind::Cphase, cli.full),
            Command::Resources => commands::resources(&cfg),
        }
    };
    let outputs = match cli.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("building the worker pool")?
            .install(exec)?,
        None => exec()?,
    };
    outputs.commit(&cfg.output.dir, &cli.command.name(), &cfg, start.elapsed().as_secs_f64())
}
