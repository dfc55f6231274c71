//! `kdsqnm`: batch driver for the horizon-geometry checks and the quasinormal-mode solver.
//!
//! Exit codes: 0 success, 1 internal error, 2 invalid parameters, 3 unsupported regime.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::Context;
use config::RunConfig;
use error::CliError;
use output::{CommandRecord, Emitter, RunManifest};

#[derive(Parser)]
#[command(name = "kdsqnm", version, about = "Horizon geometry and quasinormal modes of Kerr-de Sitter black holes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed of the quasi-random sample points; overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress the one-line summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Horizon radii, angular velocities, surface gravities and the ergoregion verdict.
    Horizons,
    /// Vacuum residual and metric inverse defect at quasi-random points of every chart.
    GeometryCheck,
    /// Normal form at each horizon and the transversal geodesic normalisation.
    GncCheck,
    /// Radial-point structure, the conormal characteristic set and sample bicharacteristics.
    RadialPoints,
    /// Quasinormal-mode spectra, eigenfunctions and their decay fits.
    Qnm,
    /// Chebyshev decay certificates of every eigenfunction at both horizons.
    Analyticity,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Horizons => "horizons",
            Command::GeometryCheck => "geometry-check",
            Command::GncCheck => "gnc-check",
            Command::RadialPoints => "radial-points",
            Command::Qnm => "qnm",
            Command::Analyticity => "analyticity",
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    RunConfig::parse(&text)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(cli)?;
    let dir = match (&cli.out, &cfg.output_dir) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) => PathBuf::from(d),
        (None, None) => PathBuf::from("out"),
    };
    let seed = cli.seed.unwrap_or(cfg.seed);
    let echo = serde_json::to_value(&cfg)?;
    let ctx = Context { cfg, seed };
    let mut emitter = Emitter::new(&dir)?;
    let start = Instant::now();
    let result = match cli.command {
        Command::Horizons => commands::horizons(&ctx, &mut emitter),
        Command::GeometryCheck => commands::geometry_check(&ctx, &mut emitter),
        Command::GncCheck => commands::gnc_check(&ctx, &mut emitter),
        Command::RadialPoints => commands::radial_points(&ctx, &mut emitter),
        Command::Qnm => commands::qnm(&ctx, &mut emitter),
        Command::Analyticity => commands::analyticity(&ctx, &mut emitter),
    };
    let record = CommandRecord {
        status: if result.is_ok() { "ok".into() } else { "error".into() },
        exit_code: result.as_ref().map_or_else(CliError::exit_code, |_| 0),
        error: result.as_ref().err().map(|e| format!("{}: {e}", e.kind())),
        wall_seconds: start.elapsed().as_secs_f64(),
        files: emitter.files.keys().cloned().collect(),
    };
    let mut manifest = RunManifest::load_or_new(&dir, echo);
    manifest.record(&dir, cli.command.name(), record)?;
    let summary = result?;
    if !cli.quiet {
        println!("{}: {summary}", cli.command.name());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kdsqnm {}: {}: {e}", cli.command.name(), e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
