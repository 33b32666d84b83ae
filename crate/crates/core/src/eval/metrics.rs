use crate::error::{Error, Result};

fn check(truth: &[u32], n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::config("cutoff N must be at least 1"));
    }
    if truth.is_empty() {
        return Err(Error::config("metrics are undefined for an empty ground truth"));
    }
    Ok(())
}

fn sorted_truth(truth: &[u32]) -> Vec<u32> {
    let mut t = truth.to_vec();
    t.sort_unstable();
    t.dedup();
    t
}

fn discount(position: usize) -> f64 {
    1.0 / ((position + 1) as f64).log2()
}

/// Precision over the first `min(N, |ranking|)` positions, recall against
/// the whole truth set, and their harmonic mean.
pub fn precision_recall_f1(ranking: &[u32], truth: &[u32], n: usize) -> Result<(f64, f64, f64)> {
    check(truth, n)?;
    let truth = sorted_truth(truth);
    let cut = n.min(ranking.len());
    let hits = ranking[..cut].iter().filter(|i| truth.binary_search(i).is_ok()).count();
    Ok(prf(hits, cut, truth.len()))
}

fn prf(hits: usize, cut: usize, truth: usize) -> (f64, f64, f64) {
    let p = if cut == 0 { 0.0 } else { hits as f64 / cut as f64 };
    let r = hits as f64 / truth as f64;
    let f1 = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f1)
}

/// Binary-relevance NDCG with the ideal ranking truncated at `min(N, |truth|)`.
pub fn ndcg(ranking: &[u32], truth: &[u32], n: usize) -> Result<f64> {
    check(truth, n)?;
    let truth = sorted_truth(truth);
    let dcg: f64 =
        ranking.iter().take(n).enumerate().filter(|(_, i)| truth.binary_search(i).is_ok()).map(|(j, _)| discount(j + 1)).sum();
    let idcg: f64 = (1..=n.min(truth.len())).map(discount).sum();
    Ok(dcg / idcg)
}

/// Metrics at every cutoff `1..=max_n` for one ranking.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Point {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub ndcg: f64,
}

pub(crate) fn prefix_metrics(ranking: &[u32], truth: &[u32], max_n: usize) -> Vec<Point> {
    let truth = sorted_truth(truth);
    let mut out = Vec::with_capacity(max_n);
    let (mut hits, mut dcg, mut idcg) = (0usize, 0.0f64, 0.0f64);
    for n in 1..=max_n {
        if let Some(item) = ranking.get(n - 1) {
            if truth.binary_search(item).is_ok() {
                hits += 1;
                dcg += discount(n);
            }
        }
        if n <= truth.len() {
            idcg += discount(n);
        }
        let (precision, recall, f1) = prf(hits, n.min(ranking.len()), truth.len());
        out.push(Point { precision, recall, f1, ndcg: dcg / idcg });
    }
    out
}
