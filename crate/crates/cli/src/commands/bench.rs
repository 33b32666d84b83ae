use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use interact2vec::eval::{benchmark_scaling, write_bench_table};
use interact2vec::TrainConfig;

use crate::args::{output_path, TrainArgs};
use crate::error::CliResult;
use crate::io::{create, load_dataset};
use crate::manifest::Recorder;
use crate::settings::{List, Settings};

#[derive(Debug, Args)]
pub struct BenchCmd {
    /// Dataset snapshot written by `ingest`.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub train: TrainArgs,
    /// Shares of the interactions to time, each in (0, 1].
    #[arg(long)]
    pub fractions: Option<List<f64>>,
    /// Timed training runs per fraction.
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Timing table with the least-squares fit as a trailing comment.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &BenchCmd, s: &mut Settings) -> CliResult<()> {
    let mut rec = Recorder::new("bench");
    let output = output_path(s, &args.output)?;
    let path: PathBuf = s.require("dataset", args.dataset.as_ref().map(|p| p.display().to_string()))?.into();
    let seed = s.pick("seed", args.seed, TrainConfig::default().seed)?;
    let cfg = args.train.resolve(s, &TrainConfig::default(), seed)?;
    let fractions = s.pick("fractions", args.fractions.clone(), List(vec![0.25, 0.5, 0.75, 1.0]))?.0;
    let repetitions = s.pick("repetitions", args.repetitions, 3)?;
    rec.input(&path)?;
    let ds = load_dataset(&path)?;

    let report = benchmark_scaling(&ds, &fractions, &cfg, repetitions, |row| {
        eprintln!("fraction {}: {} interactions, mean {:.4}s", row.fraction, row.interactions, row.mean);
    })?;
    let mut sink = create(&output)?;
    write_bench_table(&report, &mut sink)?;
    sink.flush()?;
    rec.output(&output);
    match report.fit {
        Some(f) => eprintln!("fit: slope {:.3e} s/interaction, r2 {:.4}", f.slope, f.r2),
        None => eprintln!("fit: undefined (fewer than two distinct sizes)"),
    }
    rec.summary(super::json(&report));
    rec.finish(s, &output)
}
