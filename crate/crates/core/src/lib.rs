//! User and item vectors trained jointly from implicit interaction logs,
//! with the similarity-based rankers, ranking metrics and tuning harness
//! built on them.
//!
//! The crate is organised bottom-up:
//!
//! * [`dataset`] ingests delimited interaction logs, cleans them and splits
//!   them into train/validation/test sets; [`snapshot`] persists the result.
//! * [`sampling`] holds the per-epoch frequent-item subsampler and the
//!   power-law negative sampler.
//! * [`model`] owns the embedding matrices, the pairwise negative-sampling
//!   objective and the Adam-driven training loop.
//! * [`recommend`] turns embeddings into top-N rankings.
//! * [`eval`] scores rankings and drives grid search, sensitivity sweeps and
//!   scaling benchmarks.
//! * [`synthetic`] generates structured toy datasets used by tests, benches
//!   and the browser demo.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod model;
pub mod recommend;
pub mod sampling;
pub mod seed;
pub mod snapshot;
pub mod synthetic;

pub use dataset::{InteractionDataset, SplitDataset};
pub use error::{Error, Result};
pub use model::{EmbeddingModel, TrainConfig};
pub use recommend::{Ranking, Strategy, StrategyConfig};
