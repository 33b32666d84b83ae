use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use interact2vec::model::{export_embeddings, export_text, Trainer};
use interact2vec::TrainConfig;

use crate::args::{output_path, DataArgs, TrainArgs};
use crate::error::CliResult;
use crate::io::create;
use crate::manifest::{sibling, Recorder};
use crate::settings::Settings;

#[derive(Debug, Args)]
pub struct TrainCmd {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    /// Binary embedding file; the loss trace goes to `<output>.trace.csv`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also write the embeddings as text, one `u:<key>` / `i:<key>` row per line.
    #[arg(long)]
    pub text: Option<PathBuf>,
    /// Suppress per-epoch progress.
    #[arg(long)]
    pub quiet: bool,
}

pub fn run(args: &TrainCmd, s: &mut Settings) -> CliResult<()> {
    let mut rec = Recorder::new("train");
    let output = output_path(s, &args.output)?;
    let text = s.pick_opt("text", args.text.as_ref().map(|p| p.display().to_string()))?.map(PathBuf::from);
    let data = args.data.prepare(s, &mut rec)?;
    let cfg = args.train.resolve(s, &TrainConfig::default(), data.seed)?;
    let ds = data.train();

    let started = Instant::now();
    let mut trainer = Trainer::new(ds, &cfg)?;
    let mut trace = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        let stats = trainer.run_epoch()?;
        if !args.quiet {
            eprintln!("epoch {}/{}  pairs {}  loss {:.6}", stats.epoch + 1, cfg.epochs, stats.pairs, stats.mean_loss);
        }
        trace.push(stats);
    }
    let model = trainer.finish();
    rec.time("train_seconds", started.elapsed().as_secs_f64());

    let mut sink = create(&output)?;
    export_embeddings(&model, &mut sink)?;
    sink.flush()?;
    rec.output(&output);

    let trace_path = sibling(&output, "trace.csv");
    let mut t = create(&trace_path)?;
    writeln!(t, "epoch,pairs,mean_loss,skipped")?;
    for e in &trace {
        writeln!(t, "{},{},{},{}", e.epoch, e.pairs, e.mean_loss, e.skipped)?;
    }
    t.flush()?;
    rec.output(&trace_path);
    let skipped = trace.iter().filter(|e| e.skipped).count();
    if skipped > 0 {
        rec.warn(format!("{skipped} of {} epochs kept no interactions after subsampling", cfg.epochs));
    }

    if let Some(path) = &text {
        let mut sink = create(path)?;
        export_text(&model, ds.user_keys(), ds.item_keys(), &mut sink)?;
        sink.flush()?;
        rec.output(path);
    }
    rec.summary(serde_json::json!({
        "users": model.user_count(),
        "items": model.item_count(),
        "train_interactions": ds.interaction_count(),
        "final_loss": trace.last().map(|e| e.mean_loss),
    }));
    rec.finish(s, &output)
}
