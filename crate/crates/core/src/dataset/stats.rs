use std::fmt;

use serde::Serialize;

use super::InteractionDataset;

/// Five-number summary; inner quartiles use linear interpolation between
/// order statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quartiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Quartiles {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let at = |q: f64| {
            let pos = q * (sorted.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
        };
        Some(Self { min: sorted[0], q1: at(0.25), median: at(0.5), q3: at(0.75), max: sorted[sorted.len() - 1] })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stats {
    pub users: usize,
    pub items: usize,
    pub interactions: usize,
    pub sparsity: f64,
    /// Distribution of items consumed per user.
    pub items_per_user: Option<Quartiles>,
}

pub fn dataset_stats(ds: &InteractionDataset) -> Stats {
    let per_user: Vec<f64> = (0..ds.user_count()).map(|u| ds.user_items(u).len() as f64).collect();
    Stats {
        users: ds.user_count(),
        items: ds.item_count(),
        interactions: ds.interaction_count(),
        sparsity: ds.sparsity(),
        items_per_user: Quartiles::of(&per_user),
    }
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "users\t{}", self.users)?;
        writeln!(f, "items\t{}", self.items)?;
        writeln!(f, "interactions\t{}", self.interactions)?;
        writeln!(f, "sparsity\t{:.4}%", self.sparsity * 100.0)?;
        if let Some(q) = self.items_per_user {
            writeln!(f, "items_per_user\tmin={} q1={} median={} q3={} max={}", q.min, q.q1, q.median, q.q3, q.max)?;
        }
        Ok(())
    }
}
