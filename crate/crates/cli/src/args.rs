//! Flag groups shared between subcommands and their resolution into core
//! configuration types.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use interact2vec::dataset::{split_dataset, SplitDataset, SplitRatios};
use interact2vec::eval::{Selection, StrategyKind};
use interact2vec::recommend::{EnsembleConfig, Neighbours, RankWeight, Strategy, StrategyConfig};
use interact2vec::sampling::SubsampleRule;
use interact2vec::{InteractionDataset, TrainConfig};

use crate::error::{CliError, CliResult};
use crate::io::load_dataset;
use crate::manifest::Recorder;
use crate::settings::{List, Settings};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitSpec {
    Ratios(SplitRatios),
    Off,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec::Ratios(SplitRatios::default())
    }
}

impl FromStr for SplitSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if matches!(s.trim(), "none" | "off") {
            return Ok(SplitSpec::Off);
        }
        let List(parts) = s.parse::<List<f64>>()?;
        match parts[..] {
            [a, b, c] => SplitRatios::new(a, b, c).map(SplitSpec::Ratios).map_err(|e| e.to_string()),
            _ => Err(format!("split needs three ratios like 0.8,0.1,0.1 or \"none\", got {s:?}")),
        }
    }
}

impl fmt::Display for SplitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitSpec::Ratios(r) => write!(f, "{},{},{}", r.train, r.validation, r.test),
            SplitSpec::Off => f.write_str("none"),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset snapshot written by `ingest`.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Root seed for every random stream.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Train/validation/test ratios, or `none` to use every interaction for training.
    #[arg(long)]
    pub split: Option<SplitSpec>,
}

/// A dataset with the partition the model was (or will be) trained on.
pub struct Prepared {
    pub seed: u64,
    pub full: InteractionDataset,
    pub split: Option<SplitDataset>,
}

impl Prepared {
    pub fn train(&self) -> &InteractionDataset {
        self.split.as_ref().map_or(&self.full, |s| &s.train)
    }

    pub fn require_split(&self) -> CliResult<&SplitDataset> {
        self.split.as_ref().ok_or_else(|| CliError::usage("this command needs held-out data; --split none is not allowed"))
    }
}

impl DataArgs {
    pub fn prepare(&self, s: &mut Settings, rec: &mut Recorder) -> CliResult<Prepared> {
        let path: PathBuf = s.require("dataset", self.dataset.as_ref().map(|p| p.display().to_string()))?.into();
        let seed = s.pick("seed", self.seed, TrainConfig::default().seed)?;
        let spec = s.pick("split", self.split, SplitSpec::default())?;
        rec.input(&path)?;
        let full = load_dataset(&path)?;
        let split = match spec {
            SplitSpec::Ratios(r) => Some(split_dataset(&full, r, seed)?),
            SplitSpec::Off => None,
        };
        if let Some(sp) = &split {
            if sp.pruned() > 0 {
                rec.warn(format!("{} held-out interactions dropped: user or item absent from the training split", sp.pruned()));
            }
        }
        Ok(Prepared { seed, full, split })
    }
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// Adam step size α.
    #[arg(long, visible_alias = "alpha")]
    pub learning_rate: Option<f64>,
    /// Passes over the interactions (C).
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Subsampling rate ρ.
    #[arg(long, visible_alias = "rho")]
    pub subsample_rho: Option<f64>,
    /// Measure item frequency as a share of all interactions.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub subsample_normalize: Option<bool>,
    /// Read the subsampling value as the keep or the discard probability.
    #[arg(long)]
    pub subsample_rule: Option<SubsampleRule>,
    /// Negative samples per positive pair (|G|).
    #[arg(long)]
    pub negatives: Option<usize>,
    /// Negative-sampling exponent γ.
    #[arg(long, visible_alias = "gamma", allow_hyphen_values = true)]
    pub neg_exponent: Option<f64>,
    /// Never draw a negative from the user's own history.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub exclude_history: Option<bool>,
    /// L2 penalty λ.
    #[arg(long, visible_alias = "lambda")]
    pub regularization: Option<f64>,
    /// Embedding size M.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Lock-free training workers; 0 is single-threaded and reproducible.
    #[arg(long)]
    pub workers: Option<usize>,
}

impl TrainArgs {
    pub fn resolve(&self, s: &mut Settings, base: &TrainConfig, seed: u64) -> CliResult<TrainConfig> {
        let cfg = TrainConfig {
            learning_rate: s.pick("learning_rate", self.learning_rate, base.learning_rate)?,
            epochs: s.pick("epochs", self.epochs, base.epochs)?,
            subsample_rho: s.pick("subsample_rho", self.subsample_rho, base.subsample_rho)?,
            subsample_normalize: s.pick("subsample_normalize", self.subsample_normalize, base.subsample_normalize)?,
            subsample_rule: s.pick("subsample_rule", self.subsample_rule, base.subsample_rule)?,
            negatives: s.pick("negatives", self.negatives, base.negatives)?,
            neg_exponent: s.pick("neg_exponent", self.neg_exponent, base.neg_exponent)?,
            exclude_history: s.pick("exclude_history", self.exclude_history, base.exclude_history)?,
            regularization: s.pick("regularization", self.regularization, base.regularization)?,
            dim: s.pick("dim", self.dim, base.dim)?,
            seed,
            parallel_workers: s.pick("workers", self.workers, base.parallel_workers)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct StrategyArgs {
    /// user_item, item_item, weighted, combined or ensemble.
    #[arg(long)]
    pub strategy: Option<StrategyKind>,
    /// Weight of the user-item score in the weighted strategy (β).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Weight of the item-item score in the weighted strategy (μ).
    #[arg(long)]
    pub mu: Option<f64>,
    /// Nearest consumers averaged by the combined strategy (K), or `all`.
    #[arg(long)]
    pub k: Option<Neighbours>,
    /// Ranking depth each ensemble member contributes (L).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Comma-separated ensemble members.
    #[arg(long)]
    pub members: Option<List<StrategyKind>>,
    /// Comma-separated per-member vote weights (w_m); omit for equal weights.
    #[arg(long)]
    pub method_weights: Option<List<f64>>,
    /// Position weighting of ensemble votes (w_r): off, log or linear.
    #[arg(long)]
    pub rank_weight: Option<RankWeight>,
    /// Recommendations per user (N).
    #[arg(long)]
    pub top_n: Option<usize>,
}

fn base_strategy(kind: StrategyKind, beta: f64, mu: f64, k: Neighbours) -> CliResult<Strategy> {
    Ok(match kind {
        StrategyKind::UserItem => Strategy::UserItem,
        StrategyKind::ItemItem => Strategy::ItemItem,
        StrategyKind::Weighted => Strategy::Weighted { beta, mu },
        StrategyKind::Combined => Strategy::Combined { k },
        StrategyKind::Ensemble => return Err(CliError::usage("an ensemble cannot contain another ensemble")),
    })
}

impl StrategyArgs {
    pub fn resolve(&self, s: &mut Settings, default_top_n: usize) -> CliResult<StrategyConfig> {
        let kind = s.pick("strategy", self.strategy, StrategyKind::UserItem)?;
        let top_n = s.pick("top_n", self.top_n, default_top_n)?;
        let uses_weighted = |m: &[StrategyKind]| kind == StrategyKind::Weighted || m.contains(&StrategyKind::Weighted);
        let uses_combined = |m: &[StrategyKind]| kind == StrategyKind::Combined || m.contains(&StrategyKind::Combined);
        let members = if kind == StrategyKind::Ensemble {
            s.pick(
                "members",
                self.members.clone(),
                List(vec![StrategyKind::UserItem, StrategyKind::ItemItem, StrategyKind::Weighted, StrategyKind::Combined]),
            )?
            .0
        } else {
            Vec::new()
        };
        let (mut beta, mut mu, mut k) = (0.5, 0.5, Neighbours::All);
        if uses_weighted(&members) {
            beta = s.pick("beta", self.beta, beta)?;
            mu = s.pick("mu", self.mu, mu)?;
        }
        if uses_combined(&members) {
            k = s.pick("k", self.k, k)?;
        }
        let strategy = if kind == StrategyKind::Ensemble {
            let depth = s.pick("depth", self.depth, 30)?;
            let method_weights = s.pick_opt("method_weights", self.method_weights.clone())?.map(|l| l.0);
            let rank_weight = s.pick("rank_weight", self.rank_weight, RankWeight::Off)?;
            let members = members.iter().map(|&m| base_strategy(m, beta, mu, k)).collect::<CliResult<Vec<_>>>()?;
            Strategy::Ensemble(EnsembleConfig { depth, members, method_weights, rank_weight })
        } else {
            base_strategy(kind, beta, mu, k)?
        };
        let cfg = StrategyConfig::new(strategy, top_n);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SelectionArg {
    /// Metric used to compare configurations, e.g. ndcg@15 or f1@10.
    #[arg(long)]
    pub selection: Option<Selection>,
}

pub fn output_path(s: &mut Settings, cli: &Option<PathBuf>) -> CliResult<PathBuf> {
    Ok(s.require("output", cli.as_ref().map(|p| p.display().to_string()))?.into())
}

/// Picks up the dataset, split and seed recorded next to trained embeddings.
pub fn inherit_split(s: &mut Settings, embeddings: &Path) -> CliResult<()> {
    s.inherit(embeddings, &["dataset", "seed", "split"])
}

pub fn embeddings_path(s: &mut Settings, cli: &Option<PathBuf>) -> CliResult<PathBuf> {
    Ok(s.require("embeddings", cli.as_ref().map(|p| p.display().to_string()))?.into())
}
