use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use interact2vec::dataset::EvalSet;
use interact2vec::eval::evaluate;

use crate::args::{embeddings_path, inherit_split, output_path, DataArgs, StrategyArgs};
use crate::error::{CliError, CliResult};
use crate::io::{create, load_embeddings};
use crate::manifest::{sibling, Recorder};
use crate::settings::Settings;

#[derive(Debug, Args)]
pub struct EvaluateCmd {
    #[command(flatten)]
    pub data: DataArgs,
    /// Embedding file written by `train`.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    /// validation or test.
    #[arg(long)]
    pub eval_set: Option<EvalSet>,
    /// Metric table per cutoff; the structured report goes to `<output>.json`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &EvaluateCmd, s: &mut Settings) -> CliResult<()> {
    let mut rec = Recorder::new("evaluate");
    let embeddings = embeddings_path(s, &args.embeddings)?;
    inherit_split(s, &embeddings)?;
    let output = output_path(s, &args.output)?;
    let strategy = args.strategy.resolve(s, 15)?;
    let eval_set = s.pick("eval_set", args.eval_set, EvalSet::Test)?;
    let data = args.data.prepare(s, &mut rec)?;
    rec.input(&embeddings)?;
    let model = load_embeddings(&embeddings)?;
    let split = data.require_split()?;
    super::check_model(&model, &split.train, &embeddings)?;

    let report = evaluate(split, &model, &strategy, eval_set)?;
    rec.time("recommend_seconds", report.timings.recommend_seconds);
    let mut sink = create(&output)?;
    sink.write_all(report.to_table().as_bytes())?;
    sink.flush()?;
    rec.output(&output);
    let json_path = sibling(&output, "json");
    serde_json::to_writer_pretty(create(&json_path)?, &report).map_err(|e| CliError::data(e.to_string()))?;
    rec.output(&json_path);
    let at = report.at(strategy.top_n.min(interact2vec::eval::MAX_CUTOFF));
    eprintln!("{} users: f1@{n} {:.4}  ndcg@{n} {:.4}", report.users_evaluated, at.f1, at.ndcg, n = at.n);
    rec.summary(serde_json::json!({ "users_evaluated": report.users_evaluated, "f1": at.f1, "ndcg": at.ndcg, "n": at.n }));
    rec.finish(s, &output)
}
