use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{evaluate, EvalReport, Selection};
use crate::dataset::{EvalSet, SplitDataset};
use crate::error::{Error, Result};
use crate::model::{train, TrainConfig};
use crate::recommend::{EnsembleConfig, Neighbours, RankWeight, Strategy, StrategyConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    UserItem,
    ItemItem,
    Weighted,
    Combined,
    Ensemble,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] =
        [StrategyKind::UserItem, StrategyKind::ItemItem, StrategyKind::Weighted, StrategyKind::Combined, StrategyKind::Ensemble];

    pub fn of(strategy: &Strategy) -> Self {
        match strategy {
            Strategy::UserItem => StrategyKind::UserItem,
            Strategy::ItemItem => StrategyKind::ItemItem,
            Strategy::Weighted { .. } => StrategyKind::Weighted,
            Strategy::Combined { .. } => StrategyKind::Combined,
            Strategy::Ensemble(_) => StrategyKind::Ensemble,
        }
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.replace('-', "_").as_str() {
            "user_item" => StrategyKind::UserItem,
            "item_item" => StrategyKind::ItemItem,
            "weighted" => StrategyKind::Weighted,
            "combined" => StrategyKind::Combined,
            "ensemble" => StrategyKind::Ensemble,
            _ => return Err(Error::config(format!("unknown strategy {s:?}"))),
        })
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StrategyKind::UserItem => "user_item",
            StrategyKind::ItemItem => "item_item",
            StrategyKind::Weighted => "weighted",
            StrategyKind::Combined => "combined",
            StrategyKind::Ensemble => "ensemble",
        })
    }
}

/// Model hyperparameters to sweep; everything else comes from `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelGrid {
    pub base: TrainConfig,
    pub dims: Vec<usize>,
    pub negatives: Vec<usize>,
    pub neg_exponents: Vec<f64>,
}

impl Default for ModelGrid {
    fn default() -> Self {
        Self {
            base: TrainConfig::default(),
            dims: vec![50, 100, 150],
            negatives: vec![5, 10, 15],
            neg_exponents: vec![-1.0, -0.5, 0.5, 1.0],
        }
    }
}

impl ModelGrid {
    pub fn points(&self) -> Result<Vec<TrainConfig>> {
        if self.dims.is_empty() || self.negatives.is_empty() || self.neg_exponents.is_empty() {
            return Err(Error::config("every model grid axis needs at least one value"));
        }
        let mut out = Vec::new();
        for &dim in &self.dims {
            for &negatives in &self.negatives {
                for &neg_exponent in &self.neg_exponents {
                    out.push(TrainConfig { dim, negatives, neg_exponent, ..self.base.clone() });
                }
            }
        }
        Ok(out)
    }
}

/// Strategy settings evaluated on each trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyGrid {
    pub kinds: Vec<StrategyKind>,
    pub betas: Vec<f64>,
    pub mus: Vec<f64>,
    pub combine_k: Vec<Neighbours>,
    pub depths: Vec<usize>,
    pub method_weights: Vec<bool>,
    pub rank_weights: Vec<RankWeight>,
}

impl Default for StrategyGrid {
    fn default() -> Self {
        let weights = vec![0.1, 0.25, 0.5, 0.75, 0.9];
        Self {
            kinds: StrategyKind::ALL.to_vec(),
            betas: weights.clone(),
            mus: weights,
            combine_k: vec![
                Neighbours::Count(1),
                Neighbours::Count(5),
                Neighbours::Count(10),
                Neighbours::Count(15),
                Neighbours::All,
            ],
            depths: vec![15, 30, 45],
            method_weights: vec![false, true],
            rank_weights: vec![RankWeight::Off, RankWeight::Log],
        }
    }
}

impl StrategyGrid {
    /// Non-ensemble strategies, in declared order.
    pub fn base_points(&self) -> Result<Vec<Strategy>> {
        if self.kinds.is_empty() {
            return Err(Error::config("strategy grid lists no strategies"));
        }
        let mut out = Vec::new();
        for kind in &self.kinds {
            match kind {
                StrategyKind::UserItem => out.push(Strategy::UserItem),
                StrategyKind::ItemItem => out.push(Strategy::ItemItem),
                StrategyKind::Weighted => {
                    if self.betas.is_empty() || self.mus.is_empty() {
                        return Err(Error::config("weighted strategy needs beta and mu values"));
                    }
                    for &beta in &self.betas {
                        for &mu in &self.mus {
                            out.push(Strategy::Weighted { beta, mu });
                        }
                    }
                }
                StrategyKind::Combined => {
                    if self.combine_k.is_empty() {
                        return Err(Error::config("combined strategy needs K values"));
                    }
                    out.extend(self.combine_k.iter().map(|&k| Strategy::Combined { k }));
                }
                StrategyKind::Ensemble => {
                    if self.depths.is_empty() || self.method_weights.is_empty() || self.rank_weights.is_empty() {
                        return Err(Error::config("ensemble needs depth, method-weight and rank-weight values"));
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub model_index: usize,
    pub train: TrainConfig,
    /// `None` when training itself failed.
    pub strategy: Option<StrategyConfig>,
    pub outcome: std::result::Result<EvalReport, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub selection: Selection,
    pub rows: Vec<GridRow>,
    pub best: Option<usize>,
}

impl GridResult {
    pub fn best(&self) -> Option<&GridRow> {
        self.best.map(|b| &self.rows[b])
    }
}

fn better(candidate: f64, incumbent: Option<f64>) -> bool {
    incumbent.is_none_or(|best| candidate > best)
}

/// Trains one model per model-grid point, evaluates every strategy on the
/// validation set, and selects the best cell by `selection`. Ties go to the
/// cell declared first. Ensembles vote over the best configuration found for
/// each base strategy on the same model, weighted (when enabled) by that
/// configuration's selection score.
pub fn grid_search(
    split: &SplitDataset,
    models: &ModelGrid,
    strategies: &StrategyGrid,
    selection: Selection,
    mut observe: impl FnMut(&GridRow),
) -> Result<GridResult> {
    let points = models.points()?;
    let bases = strategies.base_points()?;
    let with_ensemble = strategies.kinds.contains(&StrategyKind::Ensemble);
    let mut rows: Vec<GridRow> = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    let mut push = |row: GridRow, rows: &mut Vec<GridRow>| {
        observe(&row);
        if let Ok(report) = &row.outcome {
            let v = report.value(selection);
            if better(v, best.map(|b| b.1)) {
                best = Some((rows.len(), v));
            }
        }
        rows.push(row);
    };
    for (model_index, cfg) in points.into_iter().enumerate() {
        let started = Instant::now();
        let trained = train(&split.train, &cfg);
        let train_seconds = started.elapsed().as_secs_f64();
        let model = match trained {
            Ok(out) => out.model,
            Err(e) => {
                push(GridRow { model_index, train: cfg, strategy: None, outcome: Err(e.to_string()) }, &mut rows);
                continue;
            }
        };
        let run = |strategy: &StrategyConfig| {
            evaluate(split, &model, strategy, EvalSet::Validation)
                .map(|mut r| {
                    r.timings.train_seconds = Some(train_seconds);
                    r
                })
                .map_err(|e| e.to_string())
        };
        // best configuration and score per base kind, in first-seen order
        let mut champions: Vec<(StrategyKind, Strategy, f64)> = Vec::new();
        for strategy in &bases {
            let sc = StrategyConfig::new(strategy.clone(), selection.n);
            let outcome = run(&sc);
            if let Ok(report) = &outcome {
                let v = report.value(selection);
                let kind = StrategyKind::of(strategy);
                match champions.iter_mut().find(|c| c.0 == kind) {
                    Some(c) if v > c.2 => *c = (kind, strategy.clone(), v),
                    Some(_) => {}
                    None => champions.push((kind, strategy.clone(), v)),
                }
            }
            push(GridRow { model_index, train: cfg.clone(), strategy: Some(sc), outcome }, &mut rows);
        }
        if !with_ensemble {
            continue;
        }
        for &depth in &strategies.depths {
            for &use_weights in &strategies.method_weights {
                for &rank_weight in &strategies.rank_weights {
                    let ensemble = EnsembleConfig {
                        depth,
                        members: champions.iter().map(|c| c.1.clone()).collect(),
                        method_weights: use_weights.then(|| champions.iter().map(|c| c.2).collect()),
                        rank_weight,
                    };
                    let sc = StrategyConfig::new(Strategy::Ensemble(ensemble), selection.n);
                    let outcome = run(&sc);
                    push(GridRow { model_index, train: cfg.clone(), strategy: Some(sc), outcome }, &mut rows);
                }
            }
        }
    }
    Ok(GridResult { selection, rows, best: best.map(|b| b.0) })
}

/// Tab-separated table of every cell with its selection score, F1 and NDCG
/// at the selection cutoff, and a marker on the winner.
pub fn write_grid_table<W: Write>(result: &GridResult, mut sink: W) -> Result<()> {
    let n = result.selection.n;
    writeln!(sink, "model\tdim\tnegatives\tneg_exponent\tstrategy\tscore[{}]\tf1@{n}\tndcg@{n}\tbest\terror", result.selection)?;
    for (k, row) in result.rows.iter().enumerate() {
        let label = row.strategy.as_ref().map_or_else(|| "-".to_string(), |s| s.strategy.label());
        let (sel, f1, nd, err) = match &row.outcome {
            Ok(r) => (
                format!("{:.6}", r.value(result.selection)),
                format!("{:.6}", r.at(n).f1),
                format!("{:.6}", r.at(n).ndcg),
                String::new(),
            ),
            Err(e) => (String::new(), String::new(), String::new(), e.replace(['\t', '\n'], " ")),
        };
        let mark = if result.best == Some(k) { "*" } else { "" };
        writeln!(
            sink,
            "{}\t{}\t{}\t{}\t{label}\t{sel}\t{f1}\t{nd}\t{mark}\t{err}",
            row.model_index, row.train.dim, row.train.negatives, row.train.neg_exponent
        )?;
    }
    sink.flush()?;
    Ok(())
}
