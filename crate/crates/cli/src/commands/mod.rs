pub mod bench;
pub mod evaluate;
pub mod ingest;
pub mod recommend;
pub mod similar;
pub mod sweep;
pub mod train;
pub mod tune;

use std::path::Path;

use interact2vec::{EmbeddingModel, InteractionDataset};

use crate::error::{CliError, CliResult};

/// Rejects embeddings whose shape does not match the training partition.
pub fn check_model(model: &EmbeddingModel, train: &InteractionDataset, path: &Path) -> CliResult<()> {
    if model.user_count() != train.user_count() || model.item_count() != train.item_count() {
        return Err(CliError::data(format!(
            "{}: embeddings cover {} users and {} items but the training partition has {} and {}; check --dataset, --split and --seed",
            path.display(),
            model.user_count(),
            model.item_count(),
            train.user_count(),
            train.item_count()
        )));
    }
    Ok(())
}

pub fn json<T: serde::Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).unwrap_or(serde_json::Value::Null)
}
