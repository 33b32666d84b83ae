use rand::seq::SliceRandom;

use super::InteractionDataset;
use crate::error::{Error, Result};
use crate::seed::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self { train: 0.8, validation: 0.1, test: 0.1 }
    }
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self> {
        let ratios = Self { train, validation, test };
        ratios.validate()?;
        Ok(ratios)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.validation, self.test];
        if parts.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::config(format!("split ratios must be positive, got {parts:?}")));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!("split ratios must sum to 1, got {sum}")));
        }
        Ok(())
    }

    /// Partition sizes for `n` items by largest-remainder rounding. Ties in
    /// the remainder go to the earlier partition.
    pub fn sizes(&self, n: usize) -> [usize; 3] {
        let parts = [self.train, self.validation, self.test];
        let exact = parts.map(|r| r * n as f64);
        let mut sizes = exact.map(|x| x.floor() as usize);
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            let (ra, rb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        let assigned: usize = sizes.iter().sum();
        for &k in order.iter().take(n.saturating_sub(assigned)) {
            sizes[k] += 1;
        }
        sizes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalSet {
    Validation,
    Test,
}

impl std::fmt::Display for EvalSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EvalSet::Validation => "validation",
            EvalSet::Test => "test",
        })
    }
}

impl std::str::FromStr for EvalSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "validation" | "val" => Ok(EvalSet::Validation),
            "test" => Ok(EvalSet::Test),
            other => Err(Error::config(format!("unknown evaluation set {other:?}"))),
        }
    }
}

/// Train/validation/test partition. Validation and test pairs are expressed
/// in the train set's (re-compacted) indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitDataset {
    pub train: InteractionDataset,
    pub validation: Vec<(u32, u32)>,
    pub test: Vec<(u32, u32)>,
    pub split_seed: u64,
    pub pruned_validation: usize,
    pub pruned_test: usize,
}

impl SplitDataset {
    pub fn pairs(&self, set: EvalSet) -> &[(u32, u32)] {
        match set {
            EvalSet::Validation => &self.validation,
            EvalSet::Test => &self.test,
        }
    }

    /// Held-out items per train user, sorted.
    pub fn ground_truth(&self, set: EvalSet) -> Vec<Vec<u32>> {
        let mut truth = vec![Vec::new(); self.train.user_count()];
        for &(u, i) in self.pairs(set) {
            truth[u as usize].push(i);
        }
        for items in &mut truth {
            items.sort_unstable();
        }
        truth
    }

    pub fn pruned(&self) -> usize {
        self.pruned_validation + self.pruned_test
    }
}

/// Shuffles all interactions with the seeded generator, cuts them by
/// `ratios`, then prunes validation/test pairs whose user or item never
/// occurs in train.
pub fn split_dataset(ds: &InteractionDataset, ratios: SplitRatios, seed: u64) -> Result<SplitDataset> {
    ratios.validate()?;
    let mut shuffled = ds.interactions().to_vec();
    shuffled.shuffle(&mut seed::rng(seed, Stream::Split, 0));
    let [n_train, n_val, _] = ratios.sizes(shuffled.len());
    let (train_pairs, rest) = shuffled.split_at(n_train);
    let (val_pairs, test_pairs) = rest.split_at(n_val);

    let train = ds.restrict(train_pairs)?;
    let remap = |pairs: &[(u32, u32)]| -> (Vec<(u32, u32)>, usize) {
        let mut kept = Vec::with_capacity(pairs.len());
        for &(u, i) in pairs {
            let user = train.user_index(ds.user_key(u as usize));
            let item = train.item_index(ds.item_key(i as usize));
            if let (Some(user), Some(item)) = (user, item) {
                kept.push((user as u32, item as u32));
            }
        }
        let pruned = pairs.len() - kept.len();
        (kept, pruned)
    };
    let (validation, pruned_validation) = remap(val_pairs);
    let (test, pruned_test) = remap(test_pairs);
    Ok(SplitDataset { train, validation, test, split_seed: seed, pruned_validation, pruned_test })
}
