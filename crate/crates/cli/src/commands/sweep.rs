use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use interact2vec::dataset::EvalSet;
use interact2vec::eval::{sensitivity_sweep, write_sweep_curve, Selection, SweepParameter};
use interact2vec::TrainConfig;

use crate::args::{output_path, DataArgs, SelectionArg, StrategyArgs, TrainArgs};
use crate::error::CliResult;
use crate::io::create;
use crate::manifest::Recorder;
use crate::settings::{List, Settings};

#[derive(Debug, Args)]
pub struct SweepCmd {
    #[command(flatten)]
    pub data: DataArgs,
    /// Settings held fixed; defaults follow the one-at-a-time study baseline.
    #[command(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    #[command(flatten)]
    pub selection: SelectionArg,
    /// learning_rate, dim, epochs, subsample_rho, negatives, neg_exponent or regularization.
    #[arg(long)]
    pub parameter: Option<SweepParameter>,
    /// Values to try; defaults to the parameter's standard grid.
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<List<f64>>,
    #[arg(long)]
    pub eval_set: Option<EvalSet>,
    /// Two-column `value <tab> metric` curve.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &SweepCmd, s: &mut Settings) -> CliResult<()> {
    let mut rec = Recorder::new("sweep");
    let output = output_path(s, &args.output)?;
    let parameter = s.require("parameter", args.parameter)?;
    let values = s.pick("values", args.values.clone(), List(parameter.default_values()))?.0;
    let data = args.data.prepare(s, &mut rec)?;
    let fixed = args.train.resolve(s, &TrainConfig::sensitivity_baseline(), data.seed)?;
    let strategy = args.strategy.resolve(s, 15)?;
    let selection = s.pick("selection", args.selection.selection, Selection::default())?;
    let eval_set = s.pick("eval_set", args.eval_set, EvalSet::Validation)?;
    let split = data.require_split()?;

    let points = sensitivity_sweep(split, parameter, &values, &fixed, &strategy, eval_set)?;
    for p in &points {
        match &p.outcome {
            Ok(r) => eprintln!("{parameter} = {}: {selection} {:.4}", p.value, r.value(selection)),
            Err(e) => rec.warn(format!("{parameter} = {}: {e}", p.value)),
        }
    }
    let mut sink = create(&output)?;
    write_sweep_curve(parameter, &points, selection, &mut sink)?;
    sink.flush()?;
    rec.output(&output);
    let curve: Vec<_> = points.iter().map(|p| (p.value, p.outcome.as_ref().ok().map(|r| r.value(selection)))).collect();
    rec.summary(serde_json::json!({ "parameter": parameter.to_string(), "curve": curve }));
    rec.finish(s, &output)
}
