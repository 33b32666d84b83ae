//! Frequent-item subsampling and power-law negative sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::InteractionDataset;
use crate::error::{Error, Result};

/// How the subsampling formula's value is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubsampleRule {
    /// The clamped value is the probability of keeping an interaction.
    #[default]
    Keep,
    /// The clamped value is the probability of discarding it.
    Discard,
}

impl std::fmt::Display for SubsampleRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SubsampleRule::Keep => "keep",
            SubsampleRule::Discard => "discard",
        })
    }
}

impl std::str::FromStr for SubsampleRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "keep" => Ok(SubsampleRule::Keep),
            "discard" => Ok(SubsampleRule::Discard),
            _ => Err(Error::config(format!("subsample rule must be keep or discard, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsamplerConfig {
    pub rho: f64,
    /// Use `|U_i| / |R|` instead of the raw consumer count.
    pub normalize_by_total: bool,
    pub rule: SubsampleRule,
}

impl SubsamplerConfig {
    pub fn new(rho: f64) -> Self {
        Self { rho, normalize_by_total: true, rule: SubsampleRule::Keep }
    }
}

/// Probability that an interaction with an item of `item_degree` consumers
/// survives an epoch: `(sqrt(f/ρ) + 1) · ρ/f`, clamped to `[0, 1]`.
pub fn keep_probability(item_degree: usize, total_interactions: usize, cfg: &SubsamplerConfig) -> Result<f64> {
    if item_degree == 0 || total_interactions < item_degree {
        return Err(Error::config(format!(
            "subsampling needs 1 <= degree <= total, got degree {item_degree} of {total_interactions}"
        )));
    }
    if cfg.rho.is_nan() || cfg.rho <= 0.0 {
        return Err(Error::config(format!("subsampling rate must be positive, got {}", cfg.rho)));
    }
    let f = if cfg.normalize_by_total { item_degree as f64 / total_interactions as f64 } else { item_degree as f64 };
    let raw = ((f / cfg.rho).sqrt() + 1.0) * (cfg.rho / f);
    if !raw.is_finite() {
        return Err(Error::config(format!("subsampling probability is not finite (rho {}, f {f})", cfg.rho)));
    }
    let p = raw.clamp(0.0, 1.0);
    Ok(match cfg.rule {
        SubsampleRule::Keep => p,
        SubsampleRule::Discard => 1.0 - p,
    })
}

/// Per-item survival probabilities for one dataset.
#[derive(Debug, Clone)]
pub struct Subsampler {
    keep: Vec<f64>,
}

impl Subsampler {
    pub fn new(ds: &InteractionDataset, cfg: &SubsamplerConfig) -> Result<Self> {
        let total = ds.interaction_count();
        let keep = (0..ds.item_count()).map(|i| keep_probability(ds.item_degree(i), total, cfg)).collect::<Result<_>>()?;
        Ok(Self { keep })
    }

    pub fn keep_probabilities(&self) -> &[f64] {
        &self.keep
    }

    /// Draws one epoch's surviving interactions, in dataset order.
    pub fn epoch_view<R: Rng + ?Sized>(&self, ds: &InteractionDataset, rng: &mut R) -> Vec<(u32, u32)> {
        ds.interactions()
            .iter()
            .copied()
            .filter(|&(_, i)| {
                let p = self.keep[i as usize];
                p >= 1.0 || rng.random::<f64>() < p
            })
            .collect()
    }
}

/// Independently retains each interaction with its item's keep probability.
pub fn apply_subsampling<R: Rng + ?Sized>(
    ds: &InteractionDataset,
    cfg: &SubsamplerConfig,
    rng: &mut R,
) -> Result<Vec<(u32, u32)>> {
    Ok(Subsampler::new(ds, cfg)?.epoch_view(ds, rng))
}

/// Hard cap on redraws while rejecting excluded items.
pub const MAX_REJECTIONS: usize = 10_000;

/// Draws items with probability `z(i)^γ / Σ_j z(j)^γ` by binary search over
/// a prefix-sum table.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    gamma: f64,
    cumulative: Vec<f64>,
}

/// Items a negative draw must avoid.
#[derive(Debug, Clone, Copy)]
pub enum Exclusion<'a> {
    /// Only the current positive item.
    Item(u32),
    /// Every item in a sorted list, typically the user's whole history.
    Sorted(&'a [u32]),
}

impl Exclusion<'_> {
    fn rejects(&self, item: u32) -> bool {
        match *self {
            Exclusion::Item(x) => item == x,
            Exclusion::Sorted(list) => list.binary_search(&item).is_ok(),
        }
    }
}

impl NegativeSampler {
    pub fn new(item_degrees: &[u32], gamma: f64) -> Result<Self> {
        if item_degrees.is_empty() {
            return Err(Error::config("negative sampler needs at least one item"));
        }
        if !gamma.is_finite() {
            return Err(Error::config(format!("negative sampling exponent must be finite, got {gamma}")));
        }
        let mut cumulative = Vec::with_capacity(item_degrees.len());
        let mut total = 0.0f64;
        for (item, &degree) in item_degrees.iter().enumerate() {
            if degree == 0 {
                return Err(Error::config(format!("item {item} has no interactions")));
            }
            total += (degree as f64).powf(gamma);
            cumulative.push(total);
        }
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::config(format!("negative sampling weights overflow for gamma {gamma}")));
        }
        Ok(Self { gamma, cumulative })
    }

    pub fn from_dataset(ds: &InteractionDataset, gamma: f64) -> Result<Self> {
        Self::new(&ds.item_degrees(), gamma)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn item_count(&self) -> usize {
        self.cumulative.len()
    }

    pub fn total_weight(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn cumulative_weights(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn probability(&self, item: usize) -> f64 {
        let prev = if item == 0 { 0.0 } else { self.cumulative[item - 1] };
        (self.cumulative[item] - prev) / self.total_weight()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let target = rng.random::<f64>() * self.total_weight();
        let idx = self.cumulative.partition_point(|&c| c <= target);
        idx.min(self.cumulative.len() - 1) as u32
    }

    /// Appends `count` draws avoiding `exclusion`. Draws are with
    /// replacement, so duplicates among the negatives are possible.
    pub fn fill_negatives<R: Rng + ?Sized>(
        &self,
        exclusion: Exclusion<'_>,
        count: usize,
        rng: &mut R,
        out: &mut Vec<u32>,
    ) -> Result<()> {
        if count > 0 && self.item_count() < 2 {
            return Err(Error::config("negative sampling needs at least two items"));
        }
        let mut rejections = 0;
        for _ in 0..count {
            loop {
                let item = self.draw(rng);
                if !exclusion.rejects(item) {
                    out.push(item);
                    break;
                }
                rejections += 1;
                if rejections > MAX_REJECTIONS {
                    return Err(Error::RejectionLimit(MAX_REJECTIONS));
                }
            }
        }
        Ok(())
    }

    pub fn draw_negatives<R: Rng + ?Sized>(&self, positive: u32, count: usize, rng: &mut R) -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity(count);
        self.fill_negatives(Exclusion::Item(positive), count, rng, &mut out)?;
        Ok(out)
    }
}
