use std::collections::HashMap;

use super::{InteractionDataset, Interner, RawInteractions};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessRules {
    /// Keep only records of this interaction kind (e.g. "listen", "buy").
    pub keep_kind: Option<String>,
    pub min_item_degree: usize,
    pub min_user_degree: usize,
}

impl Default for PreprocessRules {
    fn default() -> Self {
        Self { keep_kind: None, min_item_degree: 2, min_user_degree: 2 }
    }
}

/// Cleans raw records into an implicit-feedback dataset.
///
/// In order: keep only the selected interaction kind; collapse duplicate
/// pairs; drop every pair seen with two or more distinct ratings; treat every
/// survivor as a positive interaction; repeat the user/item degree filter
/// until nothing changes. Indices follow first appearance among survivors,
/// which makes the operation idempotent.
pub fn preprocess(raw: &RawInteractions, rules: &PreprocessRules) -> Result<InteractionDataset> {
    if let Some(kind) = &rules.keep_kind {
        if !raw.records.iter().any(|r| r.kind.as_deref() == Some(kind.as_str())) {
            return Err(Error::UnknownInteractionKind(kind.clone()));
        }
    }

    let mut users = Interner::default();
    let mut items = Interner::default();
    let mut order: Vec<(u32, u32)> = Vec::new();
    // pair -> (first rating seen, conflicting)
    let mut seen: HashMap<(u32, u32), (Option<u64>, bool)> = HashMap::new();
    for record in &raw.records {
        if let Some(kind) = &rules.keep_kind {
            if record.kind.as_deref() != Some(kind.as_str()) {
                continue;
            }
        }
        let pair = (users.intern(&record.user_key), items.intern(&record.item_key));
        let rating = record.rating.map(canonical_bits);
        match seen.get_mut(&pair) {
            None => {
                seen.insert(pair, (rating, false));
                order.push(pair);
            }
            Some((first, conflict)) => match (*first, rating) {
                (Some(a), Some(b)) if a != b => *conflict = true,
                (None, Some(_)) => *first = rating,
                _ => {}
            },
        }
    }
    order.retain(|pair| !seen[pair].1);

    let pairs = degree_fixpoint(order, users.keys.len(), items.keys.len(), rules);
    if pairs.is_empty() {
        return Err(Error::DatasetExhausted);
    }
    InteractionDataset::from_key_pairs(
        pairs.iter().map(|&(u, i)| (users.keys[u as usize].as_str(), items.keys[i as usize].as_str())),
    )
}

/// Ratings compared by value; `-0.0` and `0.0` count as the same rating.
fn canonical_bits(rating: f64) -> u64 {
    if rating == 0.0 {
        0
    } else {
        rating.to_bits()
    }
}

fn degree_fixpoint(mut pairs: Vec<(u32, u32)>, user_count: usize, item_count: usize, rules: &PreprocessRules) -> Vec<(u32, u32)> {
    loop {
        let mut user_deg = vec![0usize; user_count];
        let mut item_deg = vec![0usize; item_count];
        for &(u, i) in &pairs {
            user_deg[u as usize] += 1;
            item_deg[i as usize] += 1;
        }
        let before = pairs.len();
        pairs.retain(|&(u, i)| user_deg[u as usize] >= rules.min_user_degree && item_deg[i as usize] >= rules.min_item_degree);
        if pairs.len() == before {
            return pairs;
        }
    }
}
