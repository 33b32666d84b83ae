//! Browser bindings: sampler distributions and a steppable two-block trainer.

use interact2vec::model::Trainer;
use interact2vec::recommend::{cosine, EnsembleConfig, Neighbours, Recommender};
use interact2vec::sampling::{keep_probability, NegativeSampler, SubsamplerConfig};
use interact2vec::seed::{self, Stream};
use interact2vec::synthetic::{two_block, Blocks};
use interact2vec::{EmbeddingModel, Strategy, StrategyConfig, TrainConfig};
use wasm_bindgen::prelude::*;

// String errors become JS exceptions at the boundary and stay testable natively.
fn js_err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Item degrees of the demo profile: item `k` has degree ceil(items / (k+1)).
fn zipf_profile(items: u32) -> Vec<u32> {
    (1..=items).map(|k| items.div_ceil(k)).collect()
}

/// Analytic then empirical draw frequencies, concatenated (length 2 * items).
#[wasm_bindgen(js_name = negativeDistribution)]
pub fn negative_distribution(items: u32, gamma: f64, draws: u32, seed: u32) -> Result<Vec<f64>, String> {
    let degrees = zipf_profile(items.max(2));
    let sampler = NegativeSampler::new(&degrees, gamma).map_err(js_err)?;
    let mut out: Vec<f64> = (0..degrees.len()).map(|i| sampler.probability(i)).collect();
    let mut counts = vec![0u32; degrees.len()];
    let mut rng = seed::rng(seed.into(), Stream::Worker, 0);
    for _ in 0..draws {
        counts[sampler.draw(&mut rng) as usize] += 1;
    }
    out.extend(counts.iter().map(|&c| c as f64 / draws.max(1) as f64));
    Ok(out)
}

/// Keep probability at each item degree in `degrees` for a log of `total` interactions.
#[wasm_bindgen(js_name = keepCurve)]
pub fn keep_curve(degrees: Vec<u32>, total: u32, rho: f64) -> Result<Vec<f64>, String> {
    let cfg = SubsamplerConfig::new(rho);
    degrees.iter().map(|&d| keep_probability(d as usize, total as usize, &cfg).map_err(js_err)).collect()
}

/// Two-block synthetic community trained one epoch at a time.
#[wasm_bindgen]
pub struct TwoBlockDemo {
    blocks: Blocks,
    cfg: TrainConfig,
    model: EmbeddingModel,
    epochs: usize,
    losses: Vec<f64>,
}

#[wasm_bindgen]
impl TwoBlockDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, dim: usize, learning_rate: f64, rho: f64, negatives: usize) -> Result<TwoBlockDemo, String> {
        let blocks = two_block(seed.into());
        let cfg = TrainConfig {
            dim,
            learning_rate,
            subsample_rho: rho,
            negatives,
            seed: seed.into(),
            parallel_workers: 0,
            ..TrainConfig::default()
        };
        let model = Trainer::new(&blocks.dataset, &cfg).map_err(js_err)?.finish();
        Ok(Self { blocks, cfg, model, epochs: 0, losses: Vec::new() })
    }

    /// Trains `count` more epochs. The trainer borrows the dataset, so it is
    /// rebuilt and replayed from the seed; results equal one continuous run.
    pub fn step(&mut self, count: usize) -> Result<(), String> {
        let mut trainer = Trainer::new(&self.blocks.dataset, &self.cfg).map_err(js_err)?;
        let mut losses = Vec::new();
        for _ in 0..self.epochs + count {
            losses.push(trainer.run_epoch().map_err(js_err)?.mean_loss);
        }
        self.epochs += count;
        self.losses = losses;
        self.model = trainer.finish();
        Ok(())
    }

    pub fn epochs(&self) -> usize {
        self.epochs
    }

    /// Mean loss per completed epoch; NaN for epochs with no pairs.
    pub fn losses(&self) -> Vec<f64> {
        self.losses.clone()
    }

    pub fn items(&self) -> usize {
        self.model.item_count()
    }

    pub fn users(&self) -> usize {
        self.model.user_count()
    }

    /// Row-major item-by-item cosine matrix.
    pub fn heatmap(&self) -> Vec<f64> {
        let n = self.model.item_count();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(cosine(self.model.item(i), self.model.item(j)).unwrap_or(0.0));
            }
        }
        out
    }

    /// Mean within-block item cosine minus mean cross-block cosine.
    pub fn gap(&self) -> f64 {
        let n = self.model.item_count();
        let (mut w, mut a, mut nw, mut na) = (0.0, 0.0, 0usize, 0usize);
        for i in 0..n {
            for j in i + 1..n {
                let c = cosine(self.model.item(i), self.model.item(j)).unwrap_or(0.0);
                if self.blocks.item_block[i] == self.blocks.item_block[j] {
                    w += c;
                    nw += 1;
                } else {
                    a += c;
                    na += 1;
                }
            }
        }
        w / nw.max(1) as f64 - a / na.max(1) as f64
    }

    pub fn user_block(&self, user: usize) -> usize {
        self.blocks.user_block.get(user).copied().unwrap_or(0)
    }

    pub fn item_block(&self, item: usize) -> usize {
        self.blocks.item_block.get(item).copied().unwrap_or(0)
    }

    /// Top-`n` unseen items for `user` as `[item, score, item, score, ...]`.
    pub fn recommend(&self, user: usize, strategy: &str, n: usize) -> Result<Vec<f64>, String> {
        let strategy = parse_strategy(strategy)?;
        let rec = Recommender::new(&self.model, &self.blocks.dataset, &StrategyConfig::new(strategy, n)).map_err(js_err)?;
        let ranking = rec.recommend(user).map_err(js_err)?;
        Ok(ranking.items.iter().zip(&ranking.scores).flat_map(|(&i, &s)| [i as f64, s]).collect())
    }
}

fn parse_strategy(name: &str) -> Result<Strategy, String> {
    let base = |name: &str| match name {
        "user_item" => Ok(Strategy::UserItem),
        "item_item" => Ok(Strategy::ItemItem),
        "weighted" => Ok(Strategy::Weighted { beta: 0.5, mu: 0.5 }),
        "combined" => Ok(Strategy::Combined { k: Neighbours::All }),
        other => Err(format!("unknown strategy `{other}`")),
    };
    match name {
        "ensemble" => Ok(Strategy::Ensemble(EnsembleConfig {
            depth: 30,
            members: ["user_item", "item_item", "weighted", "combined"].iter().map(|m| base(m)).collect::<Result<_, String>>()?,
            method_weights: None,
            rank_weight: Default::default(),
        })),
        other => base(other),
    }
}
