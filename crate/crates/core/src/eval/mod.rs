//! Ranking metrics, evaluation over held-out interactions, grid search,
//! sensitivity sweeps and training-time benchmarks.

mod bench;
mod grid;
mod metrics;
mod sweep;

pub use bench::{benchmark_scaling, fit_line, write_bench_table, BenchReport, BenchRow, LinearFit};
pub use grid::{grid_search, write_grid_table, GridResult, GridRow, ModelGrid, StrategyGrid, StrategyKind};
pub use metrics::{ndcg, precision_recall_f1};
pub use sweep::{sensitivity_sweep, write_sweep_curve, SweepParameter, SweepPoint};

use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::{EvalSet, SplitDataset};
use crate::error::{Error, Result};
use crate::model::EmbeddingModel;
use crate::recommend::{Ranking, Recommender, StrategyConfig};

/// Longest cutoff reported; every ranking is generated once at this length.
pub const MAX_CUTOFF: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsAt {
    pub n: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub ndcg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timings {
    pub train_seconds: Option<f64>,
    pub recommend_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub strategy: StrategyConfig,
    pub eval_set: EvalSet,
    pub users_evaluated: usize,
    /// Users with no held-out interactions, left out of the averages.
    pub users_without_truth: usize,
    /// Macro averages for N = 1..=20, index `N - 1`.
    pub metrics: Vec<MetricsAt>,
    pub timings: Timings,
}

impl EvalReport {
    pub fn at(&self, n: usize) -> &MetricsAt {
        &self.metrics[n - 1]
    }

    pub fn value(&self, selection: Selection) -> f64 {
        selection.metric.of(self.at(selection.n))
    }

    /// Tab-separated `N precision recall f1 ndcg` table with a header.
    pub fn to_table(&self) -> String {
        let mut out = String::from("n\tprecision\trecall\tf1\tndcg\n");
        for m in &self.metrics {
            out.push_str(&format!("{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\n", m.n, m.precision, m.recall, m.f1, m.ndcg));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Precision,
    Recall,
    F1,
    Ndcg,
}

impl Metric {
    pub fn of(self, m: &MetricsAt) -> f64 {
        match self {
            Metric::Precision => m.precision,
            Metric::Recall => m.recall,
            Metric::F1 => m.f1,
            Metric::Ndcg => m.ndcg,
        }
    }
}

/// Metric and cutoff used to rank configurations, e.g. `ndcg@15`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub metric: Metric,
    pub n: usize,
}

impl Default for Selection {
    fn default() -> Self {
        Self { metric: Metric::Ndcg, n: 15 }
    }
}

impl std::fmt::Display for Selection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self.metric {
            Metric::Precision => "precision",
            Metric::Recall => "recall",
            Metric::F1 => "f1",
            Metric::Ndcg => "ndcg",
        };
        write!(f, "{name}@{}", self.n)
    }
}

impl FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::config(format!("selection metric must look like ndcg@15, got {s:?}"));
        let (name, n) = s.split_once('@').ok_or_else(bad)?;
        let metric = match name.to_ascii_lowercase().as_str() {
            "precision" | "p" => Metric::Precision,
            "recall" | "r" => Metric::Recall,
            "f1" => Metric::F1,
            "ndcg" => Metric::Ndcg,
            _ => return Err(bad()),
        };
        let n: usize = n.parse().map_err(|_| bad())?;
        if !(1..=MAX_CUTOFF).contains(&n) {
            return Err(Error::config(format!("selection cutoff must be in 1..={MAX_CUTOFF}, got {n}")));
        }
        Ok(Self { metric, n })
    }
}

#[cfg(feature = "parallel")]
fn rank_users(rec: &Recommender<'_>, users: &[usize]) -> Result<Vec<Ranking>> {
    use rayon::prelude::*;
    users.par_iter().map(|&u| rec.recommend_n(u, MAX_CUTOFF)).collect()
}

#[cfg(not(feature = "parallel"))]
fn rank_users(rec: &Recommender<'_>, users: &[usize]) -> Result<Vec<Ranking>> {
    users.iter().map(|&u| rec.recommend_n(u, MAX_CUTOFF)).collect()
}

/// Ranks the top 20 for every user with held-out interactions in `eval_set`
/// and macro-averages precision, recall, F1 and NDCG at each cutoff.
pub fn evaluate(
    split: &SplitDataset,
    model: &EmbeddingModel,
    strategy: &StrategyConfig,
    eval_set: EvalSet,
) -> Result<EvalReport> {
    let started = Instant::now();
    let rec = Recommender::new(model, &split.train, strategy)?;
    let truth = split.ground_truth(eval_set);
    let users: Vec<usize> = (0..truth.len()).filter(|&u| !truth[u].is_empty()).collect();
    if users.is_empty() {
        return Err(Error::NoQualifyingUsers);
    }
    let rankings = rank_users(&rec, &users)?;
    let mut sums = vec![metrics::Point::default(); MAX_CUTOFF];
    for (ranking, &u) in rankings.iter().zip(&users) {
        for (acc, p) in sums.iter_mut().zip(metrics::prefix_metrics(&ranking.items, &truth[u], MAX_CUTOFF)) {
            acc.precision += p.precision;
            acc.recall += p.recall;
            acc.f1 += p.f1;
            acc.ndcg += p.ndcg;
        }
    }
    let count = users.len() as f64;
    let metrics = sums
        .iter()
        .enumerate()
        .map(|(k, s)| MetricsAt {
            n: k + 1,
            precision: s.precision / count,
            recall: s.recall / count,
            f1: s.f1 / count,
            ndcg: s.ndcg / count,
        })
        .collect();
    Ok(EvalReport {
        strategy: strategy.clone(),
        eval_set,
        users_evaluated: users.len(),
        users_without_truth: truth.len() - users.len(),
        metrics,
        timings: Timings { train_seconds: None, recommend_seconds: started.elapsed().as_secs_f64() },
    })
}
