//! Embedding matrices, the negative-sampling objective and its training loop.

mod adam;
mod embedding;
mod io;
mod objective;
mod train;

pub use adam::{AdamParams, OptimizerState};
pub use embedding::{init_model, EmbeddingModel, Embeddings};
pub use io::{export_embeddings, export_text, import_embeddings, EMBEDDING_MAGIC, EMBEDDING_VERSION};
pub use objective::{batch_gradients, batch_loss, log_sigmoid, pair_gradient, score_pair, sigmoid, LabeledPair, PairGradient};
pub use train::{train, train_pair, EpochStats, TrainOutcome, Trainer};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{SubsampleRule, SubsamplerConfig};

/// Training hyperparameters. `Default` carries the tuned values the model is
/// known to work well with (α 0.25, 50 epochs, ρ 1e-6, λ 0.1) together with
/// the common embedding defaults (M 100, 5 negatives, γ 0.75).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub subsample_rho: f64,
    pub subsample_normalize: bool,
    pub subsample_rule: SubsampleRule,
    pub negatives: usize,
    pub neg_exponent: f64,
    /// Reject a negative that is anywhere in the user's history, not just the
    /// current positive.
    pub exclude_history: bool,
    pub regularization: f64,
    pub dim: usize,
    pub seed: u64,
    /// 0 runs single-threaded and bit-reproducible; more shards each epoch
    /// across lock-free workers.
    pub parallel_workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.25,
            epochs: 50,
            subsample_rho: 1e-6,
            subsample_normalize: true,
            subsample_rule: SubsampleRule::Keep,
            negatives: 5,
            neg_exponent: 0.75,
            exclude_history: false,
            regularization: 0.1,
            dim: 100,
            seed: 42,
            parallel_workers: 0,
        }
    }
}

impl TrainConfig {
    /// Generic word-embedding defaults (5 epochs, ρ 1e-3, no regularization),
    /// the usual starting point for one-at-a-time sensitivity studies.
    pub fn sensitivity_baseline() -> Self {
        Self { epochs: 5, subsample_rho: 1e-3, regularization: 0.0, ..Self::default() }
    }

    pub fn subsampler(&self) -> SubsamplerConfig {
        SubsamplerConfig { rho: self.subsample_rho, normalize_by_total: self.subsample_normalize, rule: self.subsample_rule }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return fail(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if self.epochs == 0 {
            return fail("epochs must be at least 1".into());
        }
        if self.dim == 0 {
            return fail("embedding dimension must be at least 1".into());
        }
        if !(self.regularization.is_finite() && self.regularization >= 0.0) {
            return fail(format!("regularization must be non-negative, got {}", self.regularization));
        }
        if !(self.subsample_rho.is_finite() && self.subsample_rho > 0.0) {
            return fail(format!("subsampling rate must be positive, got {}", self.subsample_rho));
        }
        if !self.neg_exponent.is_finite() {
            return fail(format!("negative exponent must be finite, got {}", self.neg_exponent));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = TrainConfig::default();
        assert_eq!(
            (cfg.learning_rate, cfg.epochs, cfg.subsample_rho, cfg.regularization, cfg.dim, cfg.negatives, cfg.neg_exponent),
            (0.25, 50, 1e-6, 0.1, 100, 5, 0.75)
        );
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn validation() {
        let bad = [
            TrainConfig { epochs: 0, ..Default::default() },
            TrainConfig { dim: 0, ..Default::default() },
            TrainConfig { learning_rate: 0.0, ..Default::default() },
            TrainConfig { regularization: -1.0, ..Default::default() },
            TrainConfig { subsample_rho: 0.0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        assert!(TrainConfig { negatives: 0, regularization: 0.0, ..Default::default() }.validate().is_ok());
    }
}
