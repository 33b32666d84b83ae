use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use interact2vec::model::import_embeddings;
use interact2vec::snapshot::read_dataset;
use interact2vec::{EmbeddingModel, InteractionDataset};

use crate::error::{CliError, CliResult};

pub fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::usage(format!("cannot open {}: {e}", path.display())))
}

pub fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::usage(format!("cannot create {}: {e}", path.display())))
}

pub fn load_dataset(path: &Path) -> CliResult<InteractionDataset> {
    read_dataset(open(path)?).map_err(|e| CliError::from(e).context(path))
}

pub fn load_embeddings(path: &Path) -> CliResult<EmbeddingModel> {
    import_embeddings(open(path)?).map_err(|e| CliError::from(e).context(path))
}

/// Reads non-empty trimmed lines.
pub fn read_lines(path: &Path) -> CliResult<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot open {}: {e}", path.display())))?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

impl CliError {
    pub fn context(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }
}
