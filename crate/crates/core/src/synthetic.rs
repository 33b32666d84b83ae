//! Generated datasets with known structure.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;

use crate::dataset::InteractionDataset;
use crate::error::{Error, Result};
use crate::seed::{self, Stream};

/// Disjoint communities: users of block `b` only consume items of block `b`.
#[derive(Debug, Clone)]
pub struct Blocks {
    pub dataset: InteractionDataset,
    pub user_block: Vec<usize>,
    pub item_block: Vec<usize>,
}

/// `blocks` communities of `users` users and `items` items each; every user
/// consumes `per_user` distinct random items from its own block. User and
/// item indices are laid out block by block.
pub fn block_dataset(blocks: usize, users: usize, items: usize, per_user: usize, seed: u64) -> Result<Blocks> {
    if blocks == 0 || users == 0 || per_user == 0 || per_user > items {
        return Err(Error::config(format!(
            "need at least one block, user and interaction with per_user <= items, got {blocks}x{users}x{items}, {per_user}"
        )));
    }
    let mut rng = seed::rng(seed, Stream::Synthetic, 0);
    let user_keys: Vec<String> = (0..blocks * users).map(|u| format!("u{u}")).collect();
    let item_keys: Vec<String> = (0..blocks * items).map(|i| format!("i{i}")).collect();
    loop {
        let mut pairs = Vec::with_capacity(blocks * users * per_user);
        for b in 0..blocks {
            for k in 0..users {
                let u = (b * users + k) as u32;
                let mut chosen: Vec<u32> =
                    sample(&mut rng, items, per_user).into_iter().map(|j| (b * items + j) as u32).collect();
                chosen.sort_unstable();
                pairs.extend(chosen.into_iter().map(|i| (u, i)));
            }
        }
        let ds = InteractionDataset::from_pairs(user_keys.clone(), item_keys.clone(), pairs)?;
        // every item needs a consumer; redraw in the rare case one has none
        if (0..ds.item_count()).all(|i| ds.item_degree(i) > 0) {
            return Ok(Blocks {
                dataset: ds,
                user_block: (0..blocks * users).map(|u| u / users).collect(),
                item_block: (0..blocks * items).map(|i| i / items).collect(),
            });
        }
    }
}

/// Two communities of 20 users and 20 items, 10 interactions per user.
pub fn two_block(seed: u64) -> Blocks {
    block_dataset(2, 20, 20, 10, seed).expect("fixed parameters are valid")
}

/// `count` distinct uniformly random user–item pairs. Only entities that
/// received at least one interaction appear in the dataset.
pub fn random_dataset(users: usize, items: usize, count: usize, seed: u64) -> Result<InteractionDataset> {
    if count == 0 || count > users * items / 2 {
        return Err(Error::config(format!("cannot draw {count} distinct pairs from {users}x{items}")));
    }
    let mut rng = seed::rng(seed, Stream::Synthetic, 1);
    let mut seen = HashSet::with_capacity(count);
    let mut pairs = Vec::with_capacity(count);
    while pairs.len() < count {
        let pair = (rng.random_range(0..users), rng.random_range(0..items));
        if seen.insert(pair) {
            pairs.push((format!("u{}", pair.0), format!("i{}", pair.1)));
        }
    }
    InteractionDataset::from_key_pairs(pairs.iter().map(|(u, i)| (u.as_str(), i.as_str())))
}
