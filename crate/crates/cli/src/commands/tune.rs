use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use interact2vec::dataset::EvalSet;
use interact2vec::eval::{evaluate, grid_search, write_grid_table, ModelGrid, Selection, StrategyGrid, StrategyKind};
use interact2vec::model::train;
use interact2vec::recommend::{Neighbours, RankWeight};
use interact2vec::TrainConfig;

use crate::args::{output_path, DataArgs, SelectionArg, TrainArgs};
use crate::error::{CliError, CliResult};
use crate::io::create;
use crate::manifest::{sibling, Recorder};
use crate::settings::{List, Settings};

#[derive(Debug, Args)]
pub struct TuneCmd {
    #[command(flatten)]
    pub data: DataArgs,
    /// Fixed training settings shared by every grid point.
    #[command(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    pub selection: SelectionArg,
    /// Embedding sizes to try.
    #[arg(long)]
    pub grid_dims: Option<List<usize>>,
    /// Negative-sample counts to try.
    #[arg(long)]
    pub grid_negatives: Option<List<usize>>,
    /// Negative-sampling exponents to try.
    #[arg(long, allow_hyphen_values = true)]
    pub grid_neg_exponents: Option<List<f64>>,
    /// Strategies to try.
    #[arg(long)]
    pub grid_strategies: Option<List<StrategyKind>>,
    #[arg(long)]
    pub grid_betas: Option<List<f64>>,
    #[arg(long)]
    pub grid_mus: Option<List<f64>>,
    #[arg(long)]
    pub grid_k: Option<List<Neighbours>>,
    /// Ensemble depths L.
    #[arg(long)]
    pub grid_depths: Option<List<usize>>,
    /// Whether ensembles weight members by their validation score.
    #[arg(long)]
    pub grid_method_weights: Option<List<bool>>,
    #[arg(long)]
    pub grid_rank_weights: Option<List<RankWeight>>,
    /// Full grid table; the winning configuration and its test metrics go to `<output>.best.json`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &TuneCmd, s: &mut Settings) -> CliResult<()> {
    let mut rec = Recorder::new("tune");
    let output = output_path(s, &args.output)?;
    let data = args.data.prepare(s, &mut rec)?;
    let base = args.train.resolve(s, &TrainConfig::default(), data.seed)?;
    let selection = s.pick("selection", args.selection.selection, Selection::default())?;
    let dm = ModelGrid { base: base.clone(), ..ModelGrid::default() };
    let models = ModelGrid {
        dims: s.pick("grid_dims", args.grid_dims.clone(), List(dm.dims.clone()))?.0,
        negatives: s.pick("grid_negatives", args.grid_negatives.clone(), List(dm.negatives.clone()))?.0,
        neg_exponents: s.pick("grid_neg_exponents", args.grid_neg_exponents.clone(), List(dm.neg_exponents.clone()))?.0,
        base,
    };
    let ds = StrategyGrid::default();
    let strategies = StrategyGrid {
        kinds: s.pick("grid_strategies", args.grid_strategies.clone(), List(ds.kinds.clone()))?.0,
        betas: s.pick("grid_betas", args.grid_betas.clone(), List(ds.betas.clone()))?.0,
        mus: s.pick("grid_mus", args.grid_mus.clone(), List(ds.mus.clone()))?.0,
        combine_k: s.pick("grid_k", args.grid_k.clone(), List(ds.combine_k.clone()))?.0,
        depths: s.pick("grid_depths", args.grid_depths.clone(), List(ds.depths.clone()))?.0,
        method_weights: s.pick("grid_method_weights", args.grid_method_weights.clone(), List(ds.method_weights.clone()))?.0,
        rank_weights: s.pick("grid_rank_weights", args.grid_rank_weights.clone(), List(ds.rank_weights.clone()))?.0,
    };
    let split = data.require_split()?;

    let started = Instant::now();
    let result = grid_search(split, &models, &strategies, selection, |row| {
        let label = row.strategy.as_ref().map_or("-".to_string(), |s| s.strategy.label());
        match &row.outcome {
            Ok(r) => eprintln!("model {} dim {} {label}: {selection} {:.4}", row.model_index, row.train.dim, r.value(selection)),
            Err(e) => eprintln!("model {} dim {} {label}: failed: {e}", row.model_index, row.train.dim),
        }
    })?;
    rec.time("grid_seconds", started.elapsed().as_secs_f64());
    let failed = result.rows.iter().filter(|r| r.outcome.is_err()).count();
    if failed > 0 {
        rec.warn(format!("{failed} grid cells failed"));
    }

    let mut sink = create(&output)?;
    write_grid_table(&result, &mut sink)?;
    sink.flush()?;
    rec.output(&output);

    let best = result.best().ok_or_else(|| CliError::data("every grid cell failed"))?;
    let strategy = best.strategy.clone().expect("a scored cell has a strategy");
    let validation = best.outcome.as_ref().expect("the best cell succeeded");
    let started = Instant::now();
    let model = train(&split.train, &best.train)?.model;
    rec.time("best_retrain_seconds", started.elapsed().as_secs_f64());
    let test = evaluate(split, &model, &strategy, EvalSet::Test)?;
    let n = selection.n;
    eprintln!(
        "best: dim {} negatives {} gamma {} {}  validation {selection} {:.4}  test f1@{n} {:.4} ndcg@{n} {:.4}",
        best.train.dim,
        best.train.negatives,
        best.train.neg_exponent,
        strategy.strategy.label(),
        validation.value(selection),
        test.at(n).f1,
        test.at(n).ndcg
    );
    let summary = serde_json::json!({
        "selection": selection.to_string(),
        "train": best.train,
        "strategy": strategy,
        "validation": validation,
        "test": test,
    });
    let best_path = sibling(&output, "best.json");
    serde_json::to_writer_pretty(create(&best_path)?, &summary).map_err(|e| CliError::data(e.to_string()))?;
    rec.output(&best_path);
    rec.summary(serde_json::json!({
        "best_row": result.best,
        "validation": validation.value(selection),
        "test_f1": test.at(n).f1,
        "test_ndcg": test.at(n).ndcg,
    }));
    rec.finish(s, &output)
}
