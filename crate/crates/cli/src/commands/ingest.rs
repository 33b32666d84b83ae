use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use interact2vec::dataset::{
    dataset_stats, ingest_interactions, preprocess, ColumnSelector, ColumnSpec, Delimiter, PreprocessRules,
};
use interact2vec::snapshot::write_dataset;

use crate::args::output_path;
use crate::error::CliResult;
use crate::io::{create, open};
use crate::manifest::{sibling, Recorder};
use crate::settings::Settings;

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Delimited interaction log.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Snapshot to write; the stats report goes to `<output>.stats.txt`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// comma, tab, space (any whitespace run), semicolon or a single character.
    #[arg(long)]
    pub delimiter: Option<String>,
    /// The first line names the columns.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub header: Option<bool>,
    /// Column holding the user key: 0-based position or header name.
    #[arg(long)]
    pub user_col: Option<String>,
    #[arg(long)]
    pub item_col: Option<String>,
    /// Explicit rating; a pair seen with two different ratings is dropped.
    #[arg(long)]
    pub rating_col: Option<String>,
    /// Interaction kind, used with --keep-kind.
    #[arg(long)]
    pub kind_col: Option<String>,
    #[arg(long)]
    pub timestamp_col: Option<String>,
    /// Keep only interactions of this kind.
    #[arg(long)]
    pub keep_kind: Option<String>,
    #[arg(long)]
    pub min_user_degree: Option<usize>,
    #[arg(long)]
    pub min_item_degree: Option<usize>,
    /// Fail on the first malformed line instead of skipping it.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub strict: Option<bool>,
}

pub fn run(args: &IngestArgs, s: &mut Settings) -> CliResult<()> {
    let mut rec = Recorder::new("ingest");
    let input: PathBuf = s.require("input", args.input.as_ref().map(|p| p.display().to_string()))?.into();
    let output = output_path(s, &args.output)?;
    let defaults = PreprocessRules::default();
    let column = |s: &mut Settings, key: &str, cli: &Option<String>| -> CliResult<Option<ColumnSelector>> {
        Ok(s.pick_opt(key, cli.clone())?.map(|c| ColumnSelector::parse(&c)))
    };
    let spec = ColumnSpec {
        delimiter: Delimiter::parse(&s.pick("delimiter", args.delimiter.clone(), "comma".to_string())?)?,
        has_header: s.pick("header", args.header, false)?,
        user: ColumnSelector::parse(&s.pick("user_col", args.user_col.clone(), "0".to_string())?),
        item: ColumnSelector::parse(&s.pick("item_col", args.item_col.clone(), "1".to_string())?),
        rating: column(s, "rating_col", &args.rating_col)?,
        kind: column(s, "kind_col", &args.kind_col)?,
        timestamp: column(s, "timestamp_col", &args.timestamp_col)?,
        strict: s.pick("strict", args.strict, false)?,
    };
    let rules = PreprocessRules {
        keep_kind: s.pick_opt("keep_kind", args.keep_kind.clone())?,
        min_user_degree: s.pick("min_user_degree", args.min_user_degree, defaults.min_user_degree)?,
        min_item_degree: s.pick("min_item_degree", args.min_item_degree, defaults.min_item_degree)?,
    };

    let reader = open(&input)?;
    rec.input(&input)?;
    let raw = ingest_interactions(reader, &spec)?;
    for (line, reason) in raw.skipped.iter().take(20) {
        eprintln!("skipped line {line}: {reason}");
    }
    if !raw.skipped.is_empty() {
        rec.warn(format!("{} malformed lines skipped", raw.skipped.len()));
    }
    let ds = preprocess(&raw, &rules)?;
    let stats = dataset_stats(&ds);

    let mut sink = create(&output)?;
    write_dataset(&ds, &mut sink)?;
    sink.flush()?;
    rec.output(&output);
    let stats_path = sibling(&output, "stats.txt");
    let mut report = create(&stats_path)?;
    writeln!(report, "records\t{}", raw.records.len())?;
    writeln!(report, "skipped_lines\t{}", raw.skipped.len())?;
    write!(report, "{stats}")?;
    report.flush()?;
    rec.output(&stats_path);
    eprint!("{stats}");
    rec.summary(super::json(&stats));
    rec.finish(s, &output)
}
