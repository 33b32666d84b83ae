//! Top-N recommendation from trained embeddings.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::dataset::InteractionDataset;
use crate::error::{Error, Result};
use crate::model::EmbeddingModel;

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine<T: Float>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: b.len() });
    }
    let (mut ab, mut aa, mut bb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x.to_f64().unwrap(), y.to_f64().unwrap());
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if aa == 0.0 || bb == 0.0 {
        return Ok(0.0);
    }
    Ok((ab / (aa.sqrt() * bb.sqrt())).clamp(-1.0, 1.0))
}

/// Row-normalised copy of a matrix; zero rows stay zero.
#[derive(Debug, Clone)]
pub struct UnitRows {
    dim: usize,
    rows: Vec<f64>,
}

impl UnitRows {
    pub fn new<T: Float>(data: &[T], dim: usize) -> Self {
        let mut rows: Vec<f64> = data.iter().map(|x| x.to_f64().unwrap()).collect();
        for row in rows.chunks_mut(dim) {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|x| *x /= norm);
            }
        }
        Self { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    /// Dot product of every row with `query`.
    pub fn scores(&self, query: &[f64]) -> Vec<f64> {
        self.rows.chunks(self.dim).map(|r| r.iter().zip(query).map(|(a, b)| a * b).sum()).collect()
    }

    /// Mean cosine of every row against the rows in `subset`. Because the rows
    /// are unit length this collapses to one dot product with their centroid.
    pub fn mean_cosines(&self, subset: &[u32]) -> Vec<f64> {
        let mut centroid = vec![0.0; self.dim];
        for &j in subset {
            centroid.iter_mut().zip(self.row(j as usize)).for_each(|(c, x)| *c += x);
        }
        let n = subset.len() as f64;
        centroid.iter_mut().for_each(|c| *c /= n);
        self.scores(&centroid)
    }
}

fn check_history(model: &EmbeddingModel, user: usize, consumed: &[u32]) -> Result<()> {
    if consumed.is_empty() {
        return Err(Error::EmptyHistory { user });
    }
    for &j in consumed {
        if j as usize >= model.item_count() {
            return Err(Error::IndexOutOfRange { what: "item", index: j as usize, len: model.item_count() });
        }
    }
    Ok(())
}

fn check_user(model: &EmbeddingModel, user: usize) -> Result<()> {
    if user >= model.user_count() {
        return Err(Error::IndexOutOfRange { what: "user", index: user, len: model.user_count() });
    }
    Ok(())
}

pub fn user_item_scores(model: &EmbeddingModel, user: usize) -> Result<Vec<f64>> {
    check_user(model, user)?;
    let query = UnitRows::new(model.user(user), model.dim());
    Ok(UnitRows::new(model.item_matrix(), model.dim()).scores(query.row(0)))
}

/// Mean cosine between each item and the items in `consumed`.
pub fn item_item_scores(model: &EmbeddingModel, user: usize, consumed: &[u32]) -> Result<Vec<f64>> {
    check_history(model, user, consumed)?;
    Ok(UnitRows::new(model.item_matrix(), model.dim()).mean_cosines(consumed))
}

fn check_blend(beta: f64, mu: f64) -> Result<()> {
    if !(beta.is_finite() && mu.is_finite() && beta >= 0.0 && mu >= 0.0 && beta + mu > 0.0) {
        return Err(Error::config(format!(
            "weighted strategy needs non-negative weights with a positive sum, got beta {beta}, mu {mu}"
        )));
    }
    Ok(())
}

fn blend(user_scores: &[f64], item_scores: &[f64], beta: f64, mu: f64) -> Vec<f64> {
    user_scores.iter().zip(item_scores).map(|(su, si)| (beta * su + mu * si) / (beta + mu)).collect()
}

/// `(β·sim_u + μ·sim_i) / (β + μ)` per item.
pub fn weighted_scores(model: &EmbeddingModel, user: usize, consumed: &[u32], beta: f64, mu: f64) -> Result<Vec<f64>> {
    check_blend(beta, mu)?;
    let su = user_item_scores(model, user)?;
    let si = item_item_scores(model, user, consumed)?;
    Ok(blend(&su, &si, beta, mu))
}

/// Number of consumers averaged into an item's augmented embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Neighbours {
    Count(usize),
    All,
}

impl fmt::Display for Neighbours {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Neighbours::Count(k) => write!(f, "{k}"),
            Neighbours::All => f.write_str("all"),
        }
    }
}

impl FromStr for Neighbours {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(Neighbours::All);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Neighbours::Count(k)),
            _ => Err(Error::config(format!("neighbour count must be a positive integer or \"all\", got {s:?}"))),
        }
    }
}

impl From<Neighbours> for String {
    fn from(n: Neighbours) -> Self {
        n.to_string()
    }
}

impl TryFrom<String> for Neighbours {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Item rows extended with the mean embedding of their `k` nearest
/// consumers: row `i` is `[W'_i, Ū_i]`, width `2M`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedItems {
    pub dim: usize,
    pub rows: Vec<f64>,
}

impl AugmentedItems {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }
}

pub fn combine_embeddings(model: &EmbeddingModel, ds: &InteractionDataset, k: Neighbours) -> Result<AugmentedItems> {
    if model.user_count() != ds.user_count() {
        return Err(Error::DimensionMismatch { left: model.user_count(), right: ds.user_count() });
    }
    if model.item_count() != ds.item_count() {
        return Err(Error::DimensionMismatch { left: model.item_count(), right: ds.item_count() });
    }
    if k == Neighbours::Count(0) {
        return Err(Error::config("neighbour count must be at least 1"));
    }
    let m = model.dim();
    let mut rows = Vec::with_capacity(model.item_count() * 2 * m);
    let mut ranked: Vec<(f64, u32)> = Vec::new();
    for i in 0..model.item_count() {
        let consumers = ds.item_users(i);
        if consumers.is_empty() {
            return Err(Error::NoConsumers { item: i });
        }
        let item = model.item(i);
        let chosen: Vec<u32> = match k {
            Neighbours::Count(k) if k < consumers.len() => {
                ranked.clear();
                for &u in consumers {
                    ranked.push((cosine(item, model.user(u as usize))?, u));
                }
                ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                ranked[..k].iter().map(|&(_, u)| u).collect()
            }
            _ => consumers.to_vec(),
        };
        rows.extend(item.iter().map(|&x| x as f64));
        let start = rows.len();
        rows.resize(start + m, 0.0);
        for &u in &chosen {
            rows[start..].iter_mut().zip(model.user(u as usize)).for_each(|(acc, &x)| *acc += x as f64);
        }
        let n = chosen.len() as f64;
        rows[start..].iter_mut().for_each(|x| *x /= n);
    }
    Ok(AugmentedItems { dim: 2 * m, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankWeight {
    /// Every vote counts 1.
    #[default]
    Off,
    /// `1 / log2(rank + 1)`.
    Log,
    /// `(L − rank + 1) / L`.
    Linear,
}

impl fmt::Display for RankWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankWeight::Off => "off",
            RankWeight::Log => "log",
            RankWeight::Linear => "linear",
        })
    }
}

impl FromStr for RankWeight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "off" | "none" | "false" | "no" => Ok(RankWeight::Off),
            "log" | "yes" | "true" => Ok(RankWeight::Log),
            "linear" => Ok(RankWeight::Linear),
            _ => Err(Error::config(format!("rank weight must be off, log or linear, got {s:?}"))),
        }
    }
}

impl RankWeight {
    fn weight(self, rank: usize, depth: usize) -> f64 {
        match self {
            RankWeight::Off => 1.0,
            RankWeight::Log => 1.0 / ((rank + 1) as f64).log2(),
            RankWeight::Linear => (depth + 1 - rank) as f64 / depth as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    /// Length `L` of each member's candidate list.
    pub depth: usize,
    pub members: Vec<Strategy>,
    /// Per-member quality weights; `None` weighs members equally.
    pub method_weights: Option<Vec<f64>>,
    pub rank_weight: RankWeight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    UserItem,
    ItemItem,
    Weighted { beta: f64, mu: f64 },
    Combined { k: Neighbours },
    Ensemble(EnsembleConfig),
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::UserItem => "user_item",
            Strategy::ItemItem => "item_item",
            Strategy::Weighted { .. } => "weighted",
            Strategy::Combined { .. } => "combined",
            Strategy::Ensemble(_) => "ensemble",
        }
    }

    /// Short human-readable form including the strategy's parameters.
    pub fn label(&self) -> String {
        match self {
            Strategy::Weighted { beta, mu } => format!("weighted(beta={beta},mu={mu})"),
            Strategy::Combined { k } => format!("combined(k={k})"),
            Strategy::Ensemble(e) => {
                let members: Vec<_> = e.members.iter().map(Strategy::label).collect();
                format!("ensemble(L={},wm={},wr={},[{}])", e.depth, e.method_weights.is_some(), e.rank_weight, members.join(";"))
            }
            other => other.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub strategy: Strategy,
    pub top_n: usize,
}

impl StrategyConfig {
    pub fn new(strategy: Strategy, top_n: usize) -> Self {
        Self { strategy, top_n }
    }

    pub fn validate(&self) -> Result<()> {
        if self.top_n == 0 {
            return Err(Error::config("top_n must be at least 1"));
        }
        validate_strategy(&self.strategy, self.top_n, true)
    }
}

fn validate_strategy(strategy: &Strategy, top_n: usize, allow_ensemble: bool) -> Result<()> {
    match strategy {
        Strategy::UserItem | Strategy::ItemItem => Ok(()),
        Strategy::Weighted { beta, mu } => check_blend(*beta, *mu),
        Strategy::Combined { k } => match k {
            Neighbours::Count(0) => Err(Error::config("neighbour count must be at least 1")),
            _ => Ok(()),
        },
        Strategy::Ensemble(_) if !allow_ensemble => Err(Error::config("ensembles cannot be nested")),
        Strategy::Ensemble(e) => {
            if e.depth < top_n {
                return Err(Error::config(format!("ensemble depth {} is below top_n {top_n}", e.depth)));
            }
            if e.members.is_empty() {
                return Err(Error::config("ensemble needs at least one member"));
            }
            if let Some(w) = &e.method_weights {
                if w.len() != e.members.len() {
                    return Err(Error::config(format!("{} method weights for {} members", w.len(), e.members.len())));
                }
                if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return Err(Error::config("method weights must be finite and non-negative"));
                }
            }
            e.members.iter().try_for_each(|m| validate_strategy(m, e.depth, false))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub user: usize,
    pub items: Vec<u32>,
    pub scores: Vec<f64>,
}

fn by_score_then_index(a: &(f64, u32), b: &(f64, u32)) -> Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

/// Best `n` items outside the sorted `consumed` list, highest score first and
/// lower index first among ties.
pub fn top_n(user: usize, scores: &[f64], consumed: &[u32], n: usize) -> Ranking {
    let mut candidates: Vec<(f64, u32)> =
        scores.iter().enumerate().map(|(i, &s)| (s, i as u32)).filter(|(_, i)| consumed.binary_search(i).is_err()).collect();
    if n < candidates.len() {
        candidates.select_nth_unstable_by(n, by_score_then_index);
        candidates.truncate(n);
    }
    candidates.sort_by(by_score_then_index);
    Ranking { user, items: candidates.iter().map(|c| c.1).collect(), scores: candidates.iter().map(|c| c.0).collect() }
}

/// Votes over the members' top-`depth` lists: each listed item earns
/// `w_m · w_r` from every list it appears in. Ties are broken by the summed
/// member scores, then by item index.
pub fn ensemble_rank(
    member_rankings: &[Ranking],
    method_weights: Option<&[f64]>,
    rank_weight: RankWeight,
    depth: usize,
    n: usize,
) -> Result<Ranking> {
    if member_rankings.is_empty() {
        return Err(Error::config("ensemble needs at least one member"));
    }
    if depth < n {
        return Err(Error::config(format!("ensemble depth {depth} is below top_n {n}")));
    }
    if let Some(w) = method_weights {
        if w.len() != member_rankings.len() {
            return Err(Error::config(format!("{} method weights for {} members", w.len(), member_rankings.len())));
        }
    }
    Ok(vote(member_rankings, method_weights, rank_weight, depth, n))
}

fn vote(member_rankings: &[Ranking], method_weights: Option<&[f64]>, rank_weight: RankWeight, depth: usize, n: usize) -> Ranking {
    // item → (vote, summed similarity)
    let mut tally: Vec<(u32, f64, f64)> = Vec::new();
    for (m, ranking) in member_rankings.iter().enumerate() {
        let wm = method_weights.map_or(1.0, |w| w[m]);
        for (pos, (&item, &score)) in ranking.items.iter().zip(&ranking.scores).take(depth).enumerate() {
            let vote = wm * rank_weight.weight(pos + 1, depth);
            match tally.iter_mut().find(|t| t.0 == item) {
                Some(t) => {
                    t.1 += vote;
                    t.2 += score;
                }
                None => tally.push((item, vote, score)),
            }
        }
    }
    tally.sort_by(|a, b| b.1.total_cmp(&a.1).then(b.2.total_cmp(&a.2)).then(a.0.cmp(&b.0)));
    tally.truncate(n);
    Ranking {
        user: member_rankings[0].user,
        items: tally.iter().map(|t| t.0).collect(),
        scores: tally.iter().map(|t| t.1).collect(),
    }
}

/// Precomputed state for ranking any user under one strategy.
pub struct Recommender<'a> {
    model: &'a EmbeddingModel,
    train: &'a InteractionDataset,
    config: StrategyConfig,
    kind: Kind,
}

enum Kind {
    UserItem { users: UnitRows, items: UnitRows },
    ItemItem { items: UnitRows },
    Weighted { users: UnitRows, items: UnitRows, beta: f64, mu: f64 },
    Combined { items: UnitRows },
    Ensemble { members: Vec<Kind>, depth: usize, weights: Option<Vec<f64>>, rank_weight: RankWeight },
}

impl Kind {
    fn build(model: &EmbeddingModel, train: &InteractionDataset, strategy: &Strategy) -> Result<Self> {
        let users = || UnitRows::new(model.user_matrix(), model.dim());
        let items = || UnitRows::new(model.item_matrix(), model.dim());
        Ok(match strategy {
            Strategy::UserItem => Kind::UserItem { users: users(), items: items() },
            Strategy::ItemItem => Kind::ItemItem { items: items() },
            Strategy::Weighted { beta, mu } => Kind::Weighted { users: users(), items: items(), beta: *beta, mu: *mu },
            Strategy::Combined { k } => {
                let aug = combine_embeddings(model, train, *k)?;
                Kind::Combined { items: UnitRows::new(&aug.rows, aug.dim) }
            }
            Strategy::Ensemble(e) => Kind::Ensemble {
                members: e.members.iter().map(|m| Kind::build(model, train, m)).collect::<Result<_>>()?,
                depth: e.depth,
                weights: e.method_weights.clone(),
                rank_weight: e.rank_weight,
            },
        })
    }

    fn scores(&self, user: usize, consumed: &[u32]) -> Result<Vec<f64>> {
        let history = || if consumed.is_empty() { Err(Error::EmptyHistory { user }) } else { Ok(()) };
        match self {
            Kind::UserItem { users, items } => Ok(items.scores(users.row(user))),
            Kind::ItemItem { items } | Kind::Combined { items } => {
                history()?;
                Ok(items.mean_cosines(consumed))
            }
            Kind::Weighted { users, items, beta, mu } => {
                let su = if *beta > 0.0 { items.scores(users.row(user)) } else { vec![0.0; items.len()] };
                let si = if *mu > 0.0 {
                    history()?;
                    items.mean_cosines(consumed)
                } else {
                    vec![0.0; items.len()]
                };
                Ok(blend(&su, &si, *beta, *mu))
            }
            Kind::Ensemble { .. } => Err(Error::config("ensembles produce rankings, not per-item scores")),
        }
    }

    fn rank(&self, user: usize, consumed: &[u32], n: usize) -> Result<Ranking> {
        match self {
            Kind::Ensemble { members, depth, weights, rank_weight } => {
                let lists = members.iter().map(|m| m.rank(user, consumed, *depth)).collect::<Result<Vec<_>>>()?;
                Ok(vote(&lists, weights.as_deref(), *rank_weight, *depth, n))
            }
            base => Ok(top_n(user, &base.scores(user, consumed)?, consumed, n)),
        }
    }
}

impl<'a> Recommender<'a> {
    pub fn new(model: &'a EmbeddingModel, train: &'a InteractionDataset, config: &StrategyConfig) -> Result<Self> {
        config.validate()?;
        if model.user_count() != train.user_count() {
            return Err(Error::DimensionMismatch { left: model.user_count(), right: train.user_count() });
        }
        if model.item_count() != train.item_count() {
            return Err(Error::DimensionMismatch { left: model.item_count(), right: train.item_count() });
        }
        let kind = Kind::build(model, train, &config.strategy)?;
        Ok(Self { model, train, config: config.clone(), kind })
    }

    pub fn config(&self) -> &StrategyConfig {
        &self.config
    }

    pub fn model(&self) -> &EmbeddingModel {
        self.model
    }

    /// Per-item scores for base strategies; an error for ensembles.
    pub fn scores(&self, user: usize) -> Result<Vec<f64>> {
        check_user(self.model, user)?;
        self.kind.scores(user, self.train.user_items(user))
    }

    pub fn recommend(&self, user: usize) -> Result<Ranking> {
        self.recommend_n(user, self.config.top_n)
    }

    /// Like [`Recommender::recommend`] with an explicit list length. An
    /// ensemble still votes over its members' top-`L` lists when `n > L`.
    pub fn recommend_n(&self, user: usize, n: usize) -> Result<Ranking> {
        check_user(self.model, user)?;
        self.kind.rank(user, self.train.user_items(user), n)
    }
}

/// A seed item's nearest neighbours, or why it could not be resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedNeighbours {
    pub seed: String,
    pub neighbours: std::result::Result<Vec<(u32, f64)>, String>,
}

/// `k` most cosine-similar items to each seed key, excluding the seed.
pub fn similarity_table(model: &EmbeddingModel, item_keys: &[String], seeds: &[String], k: usize) -> Result<Vec<SeedNeighbours>> {
    if item_keys.len() != model.item_count() {
        return Err(Error::DimensionMismatch { left: item_keys.len(), right: model.item_count() });
    }
    let units = UnitRows::new(model.item_matrix(), model.dim());
    Ok(seeds
        .iter()
        .map(|seed| {
            let neighbours = match item_keys.iter().position(|key| key == seed) {
                None => Err(format!("unknown item key {seed:?}")),
                Some(s) => {
                    let ranking = top_n(0, &units.scores(units.row(s)), &[s as u32], k);
                    Ok(ranking.items.into_iter().zip(ranking.scores).collect())
                }
            };
            SeedNeighbours { seed: seed.clone(), neighbours }
        })
        .collect())
}

fn field(text: &str) -> std::borrow::Cow<'_, str> {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\"")).into()
    } else {
        text.into()
    }
}

/// Writes `user_key,rank,item_key,score` rows, ranks 1-based.
pub fn write_rankings<W: Write>(rankings: &[Ranking], user_keys: &[String], item_keys: &[String], mut sink: W) -> Result<()> {
    writeln!(sink, "user_key,rank,item_key,score")?;
    for r in rankings {
        let user = user_keys.get(r.user).ok_or(Error::IndexOutOfRange { what: "user", index: r.user, len: user_keys.len() })?;
        for (rank, (&item, score)) in r.items.iter().zip(&r.scores).enumerate() {
            let key = item_keys.get(item as usize).ok_or(Error::IndexOutOfRange {
                what: "item",
                index: item as usize,
                len: item_keys.len(),
            })?;
            writeln!(sink, "{},{},{},{score}", field(user), rank + 1, field(key))?;
        }
    }
    sink.flush()?;
    Ok(())
}

/// Writes `seed,rank,neighbor,similarity,error` rows; an unresolved seed gets
/// a single row with only the error column filled.
pub fn write_similarity_table<W: Write>(table: &[SeedNeighbours], item_keys: &[String], mut sink: W) -> Result<()> {
    writeln!(sink, "seed,rank,neighbor,similarity,error")?;
    for entry in table {
        match &entry.neighbours {
            Ok(list) => {
                for (rank, &(item, sim)) in list.iter().enumerate() {
                    writeln!(sink, "{},{},{},{sim},", field(&entry.seed), rank + 1, field(&item_keys[item as usize]))?;
                }
            }
            Err(message) => writeln!(sink, "{},,,,{}", field(&entry.seed), field(message))?,
        }
    }
    sink.flush()?;
    Ok(())
}
