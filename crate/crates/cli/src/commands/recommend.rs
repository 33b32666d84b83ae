use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use interact2vec::recommend::{write_rankings, Recommender};

use crate::args::{embeddings_path, inherit_split, output_path, DataArgs, StrategyArgs};
use crate::error::CliResult;
use crate::io::{create, load_embeddings, read_lines};
use crate::manifest::Recorder;
use crate::settings::{List, Settings};

#[derive(Debug, Args)]
pub struct RecommendCmd {
    #[command(flatten)]
    pub data: DataArgs,
    /// Embedding file written by `train`.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    /// Comma-separated user keys; default is every user in the training partition.
    #[arg(long, conflicts_with = "users_file")]
    pub users: Option<List<String>>,
    /// File with one user key per line.
    #[arg(long)]
    pub users_file: Option<PathBuf>,
    /// Rankings as `user_key,rank,item_key,score` rows.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &RecommendCmd, s: &mut Settings) -> CliResult<()> {
    let mut rec = Recorder::new("recommend");
    let embeddings = embeddings_path(s, &args.embeddings)?;
    inherit_split(s, &embeddings)?;
    let output = output_path(s, &args.output)?;
    let strategy = args.strategy.resolve(s, 15)?;
    let data = args.data.prepare(s, &mut rec)?;
    rec.input(&embeddings)?;
    let model = load_embeddings(&embeddings)?;
    let train = data.train();
    super::check_model(&model, train, &embeddings)?;

    let requested: Option<Vec<String>> = match (&args.users, &args.users_file) {
        (Some(list), _) => Some(list.0.clone()),
        (None, Some(path)) => {
            rec.input(path)?;
            Some(read_lines(path)?)
        }
        (None, None) => None,
    };
    let started = Instant::now();
    let recommender = Recommender::new(&model, train, &strategy)?;
    let mut rankings = Vec::new();
    match requested {
        None => {
            for u in 0..train.user_count() {
                match recommender.recommend(u) {
                    Ok(r) => rankings.push(r),
                    Err(e) => rec.warn(format!("user {:?}: {e}", train.user_key(u))),
                }
            }
        }
        Some(keys) => {
            for key in keys {
                match train.user_index(&key) {
                    None => rec.warn(format!("user {key:?}: not in the training partition")),
                    Some(u) => match recommender.recommend(u) {
                        Ok(r) => rankings.push(r),
                        Err(e) => rec.warn(format!("user {key:?}: {e}")),
                    },
                }
            }
        }
    }
    rec.time("recommend_seconds", started.elapsed().as_secs_f64());

    let mut sink = create(&output)?;
    write_rankings(&rankings, train.user_keys(), train.item_keys(), &mut sink)?;
    sink.flush()?;
    rec.output(&output);
    if rec.warnings() > 0 {
        eprintln!("{} users skipped with warnings", rec.warnings());
    }
    rec.summary(serde_json::json!({ "users_ranked": rankings.len(), "strategy": strategy.strategy.label() }));
    rec.finish(s, &output)
}
