mod args;
mod commands;
mod error;
mod io;
mod manifest;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliResult;
use crate::settings::Settings;

/// Train user and item embeddings from implicit feedback and produce,
/// evaluate and tune top-N recommendations.
#[derive(Debug, Parser)]
#[command(name = "interact2vec", version)]
struct Cli {
    /// Flat `key = value` file, or a run manifest to repeat; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and clean an interaction log into a dataset snapshot.
    Ingest(commands::ingest::IngestArgs),
    /// Split a snapshot and train embeddings on the training partition.
    Train(commands::train::TrainCmd),
    /// Write top-N rankings for some or all users.
    Recommend(commands::recommend::RecommendCmd),
    /// Score a strategy on the validation or test partition.
    Evaluate(commands::evaluate::EvaluateCmd),
    /// Grid-search model and strategy settings on validation, report the winner on test.
    Tune(commands::tune::TuneCmd),
    /// Vary one training setting and record the metric curve.
    Sweep(commands::sweep::SweepCmd),
    /// Time training on growing slices of the data and fit a line.
    Bench(commands::bench::BenchCmd),
    /// List the nearest items to each seed item.
    Similar(commands::similar::SimilarCmd),
}

fn run(cli: &Cli) -> CliResult<()> {
    let mut settings = Settings::load(cli.config.as_deref())?;
    let s = &mut settings;
    match &cli.command {
        Command::Ingest(a) => commands::ingest::run(a, s),
        Command::Train(a) => commands::train::run(a, s),
        Command::Recommend(a) => commands::recommend::run(a, s),
        Command::Evaluate(a) => commands::evaluate::run(a, s),
        Command::Tune(a) => commands::tune::run(a, s),
        Command::Sweep(a) => commands::sweep::run(a, s),
        Command::Bench(a) => commands::bench::run(a, s),
        Command::Similar(a) => commands::similar::run(a, s),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
