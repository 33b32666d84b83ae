use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::dataset::InteractionDataset;
use crate::error::{Error, Result};
use crate::model::{train, TrainConfig};
use crate::seed::{self, Stream};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub fraction: f64,
    pub interactions: usize,
    /// Wall-clock seconds of each training run.
    pub samples: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

/// Least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// `None` when fewer than two distinct sizes were timed.
    pub fit: Option<LinearFit>,
}

pub fn fit_line(points: &[(f64, f64)]) -> Option<LinearFit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit { slope, intercept, r2 })
}

/// Times `repetitions` training runs on a random subset of each fraction of
/// the interactions and fits mean time against subset size. Only the
/// training call is timed.
pub fn benchmark_scaling(
    ds: &InteractionDataset,
    fractions: &[f64],
    cfg: &TrainConfig,
    repetitions: usize,
    mut observe: impl FnMut(&BenchRow),
) -> Result<BenchReport> {
    if repetitions == 0 {
        return Err(Error::config("benchmark needs at least one repetition"));
    }
    if fractions.is_empty() {
        return Err(Error::config("benchmark needs at least one fraction"));
    }
    if let Some(f) = fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
        return Err(Error::config(format!("fractions must lie in (0, 1], got {f}")));
    }
    cfg.validate()?;
    let mut rows = Vec::with_capacity(fractions.len());
    for (k, &fraction) in fractions.iter().enumerate() {
        let mut pairs = ds.interactions().to_vec();
        pairs.shuffle(&mut seed::rng(cfg.seed, Stream::Subset, k as u64));
        let keep = ((fraction * pairs.len() as f64).round() as usize).clamp(1, pairs.len());
        pairs.truncate(keep);
        let subset = ds.restrict(&pairs)?;
        let samples = (0..repetitions)
            .map(|_| {
                let started = Instant::now();
                train(&subset, cfg)?;
                Ok(started.elapsed().as_secs_f64())
            })
            .collect::<Result<Vec<_>>>()?;
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let std = (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / samples.len() as f64).sqrt();
        let row = BenchRow { fraction, interactions: keep, samples, mean, std };
        observe(&row);
        rows.push(row);
    }
    let fit = fit_line(&rows.iter().map(|r| (r.interactions as f64, r.mean)).collect::<Vec<_>>());
    Ok(BenchReport { rows, fit })
}

/// `interactions <tab> mean_seconds <tab> std_seconds` plus the fit summary.
pub fn write_bench_table<W: Write>(report: &BenchReport, mut sink: W) -> Result<()> {
    writeln!(sink, "fraction\tinteractions\tmean_seconds\tstd_seconds")?;
    for r in &report.rows {
        writeln!(sink, "{}\t{}\t{:.6}\t{:.6}", r.fraction, r.interactions, r.mean, r.std)?;
    }
    match report.fit {
        Some(f) => writeln!(sink, "# fit: slope {:.6e} s/interaction, intercept {:.6} s, r2 {:.6}", f.slope, f.intercept, f.r2)?,
        None => writeln!(sink, "# fit: undefined (fewer than two distinct sizes)")?,
    }
    sink.flush()?;
    Ok(())
}
