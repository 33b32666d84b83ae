//! Interaction logs: ingestion, cleaning, indexing and splitting.

mod ingest;
mod preprocess;
mod split;
mod stats;

use std::collections::HashMap;

pub use ingest::{ingest_interactions, ColumnSelector, ColumnSpec, Delimiter, RawInteractions, RawRecord};
pub use preprocess::{preprocess, PreprocessRules};
pub use split::{split_dataset, EvalSet, SplitDataset, SplitRatios};
pub use stats::{dataset_stats, Quartiles, Stats};

use crate::error::{Error, Result};

/// A deduplicated set of implicit interactions over dense 0-based user and
/// item indices.
///
/// Built once and then read-only. Interactions keep their construction
/// order; the per-entity adjacency lists are sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionDataset {
    user_keys: Vec<String>,
    item_keys: Vec<String>,
    user_lookup: HashMap<String, u32>,
    item_lookup: HashMap<String, u32>,
    interactions: Vec<(u32, u32)>,
    user_items: Vec<Vec<u32>>,
    item_users: Vec<Vec<u32>>,
}

impl InteractionDataset {
    /// Builds a dataset from key tables and index pairs.
    ///
    /// Fails on out-of-range indices, duplicate pairs or duplicate keys.
    /// Entities without interactions are allowed here; `preprocess` and
    /// `split_dataset` never produce them.
    pub fn from_pairs(user_keys: Vec<String>, item_keys: Vec<String>, interactions: Vec<(u32, u32)>) -> Result<Self> {
        let user_lookup = key_lookup(&user_keys, "user")?;
        let item_lookup = key_lookup(&item_keys, "item")?;
        let mut user_items = vec![Vec::new(); user_keys.len()];
        let mut item_users = vec![Vec::new(); item_keys.len()];
        for &(u, i) in &interactions {
            let (ui, ii) = (u as usize, i as usize);
            if ui >= user_keys.len() {
                return Err(Error::IndexOutOfRange { what: "user", index: ui, len: user_keys.len() });
            }
            if ii >= item_keys.len() {
                return Err(Error::IndexOutOfRange { what: "item", index: ii, len: item_keys.len() });
            }
            user_items[ui].push(i);
            item_users[ii].push(u);
        }
        for (u, items) in user_items.iter_mut().enumerate() {
            items.sort_unstable();
            if let Some(w) = items.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::config(format!("duplicate interaction ({}, {})", user_keys[u], item_keys[w[0] as usize])));
            }
        }
        for users in item_users.iter_mut() {
            users.sort_unstable();
        }
        Ok(Self { user_keys, item_keys, user_lookup, item_lookup, interactions, user_items, item_users })
    }

    /// Builds a dataset from key pairs, assigning indices by first appearance.
    pub fn from_key_pairs<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut users = Interner::default();
        let mut items = Interner::default();
        let interactions = pairs.into_iter().map(|(u, i)| (users.intern(u), items.intern(i))).collect();
        Self::from_pairs(users.keys, items.keys, interactions)
    }

    pub fn user_count(&self) -> usize {
        self.user_keys.len()
    }

    pub fn item_count(&self) -> usize {
        self.item_keys.len()
    }

    pub fn interaction_count(&self) -> usize {
        self.interactions.len()
    }

    pub fn interactions(&self) -> &[(u32, u32)] {
        &self.interactions
    }

    /// Items consumed by `user`, sorted ascending.
    pub fn user_items(&self, user: usize) -> &[u32] {
        &self.user_items[user]
    }

    /// Users who consumed `item`, sorted ascending.
    pub fn item_users(&self, item: usize) -> &[u32] {
        &self.item_users[item]
    }

    pub fn item_degree(&self, item: usize) -> usize {
        self.item_users[item].len()
    }

    pub fn item_degrees(&self) -> Vec<u32> {
        self.item_users.iter().map(|u| u.len() as u32).collect()
    }

    pub fn contains(&self, user: usize, item: u32) -> bool {
        self.user_items.get(user).is_some_and(|items| items.binary_search(&item).is_ok())
    }

    /// `1 - |R| / (|U|·|I|)`; zero for an empty catalogue.
    pub fn sparsity(&self) -> f64 {
        let cells = self.user_count() as f64 * self.item_count() as f64;
        if cells == 0.0 {
            return 0.0;
        }
        1.0 - self.interaction_count() as f64 / cells
    }

    pub fn user_key(&self, user: usize) -> &str {
        &self.user_keys[user]
    }

    pub fn item_key(&self, item: usize) -> &str {
        &self.item_keys[item]
    }

    pub fn user_keys(&self) -> &[String] {
        &self.user_keys
    }

    pub fn item_keys(&self) -> &[String] {
        &self.item_keys
    }

    pub fn user_index(&self, key: &str) -> Option<usize> {
        self.user_lookup.get(key).map(|&u| u as usize)
    }

    pub fn item_index(&self, key: &str) -> Option<usize> {
        self.item_lookup.get(key).map(|&i| i as usize)
    }

    /// Re-expresses the dataset as raw records in interaction order, so it can
    /// be fed back through [`preprocess`].
    pub fn to_raw(&self) -> RawInteractions {
        let records = self
            .interactions
            .iter()
            .map(|&(u, i)| RawRecord::new(self.user_key(u as usize), self.item_key(i as usize)))
            .collect::<Vec<_>>();
        RawInteractions { lines_read: records.len(), records, skipped: Vec::new() }
    }

    /// Restricts the dataset to `pairs` (given in this dataset's indices),
    /// dropping entities left without interactions and re-compacting indices
    /// in their original relative order.
    pub fn restrict(&self, pairs: &[(u32, u32)]) -> Result<Self> {
        let mut user_map = vec![u32::MAX; self.user_count()];
        let mut item_map = vec![u32::MAX; self.item_count()];
        for &(u, i) in pairs {
            user_map[u as usize] = 0;
            item_map[i as usize] = 0;
        }
        let user_keys = compact(&mut user_map, &self.user_keys);
        let item_keys = compact(&mut item_map, &self.item_keys);
        let remapped = pairs.iter().map(|&(u, i)| (user_map[u as usize], item_map[i as usize])).collect();
        Self::from_pairs(user_keys, item_keys, remapped)
    }
}

/// Assigns new dense indices to marked slots (`!= u32::MAX`) and returns the
/// surviving keys.
fn compact(map: &mut [u32], keys: &[String]) -> Vec<String> {
    let mut kept = Vec::new();
    for (old, slot) in map.iter_mut().enumerate() {
        if *slot != u32::MAX {
            *slot = kept.len() as u32;
            kept.push(keys[old].clone());
        }
    }
    kept
}

fn key_lookup(keys: &[String], what: &str) -> Result<HashMap<String, u32>> {
    let mut lookup = HashMap::with_capacity(keys.len());
    for (idx, key) in keys.iter().enumerate() {
        if lookup.insert(key.clone(), idx as u32).is_some() {
            return Err(Error::config(format!("duplicate {what} key {key:?}")));
        }
    }
    Ok(lookup)
}

#[derive(Default)]
pub(crate) struct Interner {
    pub(crate) keys: Vec<String>,
    lookup: HashMap<String, u32>,
}

impl Interner {
    pub(crate) fn intern(&mut self, key: &str) -> u32 {
        if let Some(&idx) = self.lookup.get(key) {
            return idx;
        }
        let idx = self.keys.len() as u32;
        self.keys.push(key.to_owned());
        self.lookup.insert(key.to_owned(), idx);
        idx
    }
}
