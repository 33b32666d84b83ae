use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use interact2vec::recommend::{similarity_table, write_similarity_table};

use crate::args::{embeddings_path, inherit_split, output_path, DataArgs};
use crate::error::{CliError, CliResult};
use crate::io::{create, load_embeddings, read_lines};
use crate::manifest::Recorder;
use crate::settings::{List, Settings};

#[derive(Debug, Args)]
pub struct SimilarCmd {
    #[command(flatten)]
    pub data: DataArgs,
    /// Embedding file written by `train`.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Neighbours listed per seed item.
    #[arg(long)]
    pub k: Option<usize>,
    /// File with one seed item key per line.
    #[arg(long, conflicts_with = "items")]
    pub seeds: Option<PathBuf>,
    /// Comma-separated seed item keys.
    #[arg(long)]
    pub items: Option<List<String>>,
    /// Table of `seed,rank,neighbor,similarity,error` rows.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &SimilarCmd, s: &mut Settings) -> CliResult<()> {
    let mut rec = Recorder::new("similar");
    let embeddings = embeddings_path(s, &args.embeddings)?;
    inherit_split(s, &embeddings)?;
    let output = output_path(s, &args.output)?;
    let k = s.pick("k", args.k, 3)?;
    let data = args.data.prepare(s, &mut rec)?;
    rec.input(&embeddings)?;
    let model = load_embeddings(&embeddings)?;
    let train = data.train();
    super::check_model(&model, train, &embeddings)?;

    let seeds = match (&args.seeds, &args.items) {
        (Some(path), _) => {
            rec.input(path)?;
            read_lines(path)?
        }
        (None, Some(list)) => list.0.clone(),
        (None, None) => return Err(CliError::usage("give seed items with --seeds <file> or --items a,b,...")),
    };
    let table = similarity_table(&model, train.item_keys(), &seeds, k)?;
    for entry in &table {
        if let Err(e) = &entry.neighbours {
            rec.warn(format!("seed {:?}: {e}", entry.seed));
        }
    }
    let mut sink = create(&output)?;
    write_similarity_table(&table, train.item_keys(), &mut sink)?;
    sink.flush()?;
    rec.output(&output);
    rec.finish(s, &output)
}
