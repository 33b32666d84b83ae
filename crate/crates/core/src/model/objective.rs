use std::collections::BTreeSet;

use num_traits::Float;

use super::Embeddings;
use crate::error::Result;

/// Logistic function, evaluated without overflow for large `|x|`.
pub fn sigmoid<T: Float>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// `ln(1 + e^x)`, stable for large `|x|`.
fn softplus<T: Float>(x: T) -> T {
    x.max(T::zero()) + (-x.abs()).exp().ln_1p()
}

pub fn log_sigmoid<T: Float>(x: T) -> T {
    -softplus(-x)
}

fn dot<T: Float>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn squared_norm<T: Float>(a: &[T]) -> T {
    dot(a, a)
}

/// `φ(u, i) = 1 / (1 + e^{-W_u · W'_i})`.
pub fn score_pair<T: Float>(model: &Embeddings<T>, user: usize, item: usize) -> Result<T> {
    model.check_user(user)?;
    model.check_item(item)?;
    Ok(sigmoid(dot(model.user(user), model.item(item))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabeledPair {
    pub user: u32,
    pub item: u32,
    pub positive: bool,
}

impl LabeledPair {
    pub fn positive(user: u32, item: u32) -> Self {
        Self { user, item, positive: true }
    }

    pub fn negative(user: u32, item: u32) -> Self {
        Self { user, item, positive: false }
    }
}

fn check_pairs<T: Float>(model: &Embeddings<T>, pairs: &[LabeledPair]) -> Result<()> {
    for p in pairs {
        model.check_user(p.user as usize)?;
        model.check_item(p.item as usize)?;
    }
    Ok(())
}

/// Summed negative log-likelihood of `pairs` plus `λ‖row‖²` for every
/// distinct user and item row the pairs touch. No parameters change.
pub fn batch_loss<T: Float>(model: &Embeddings<T>, pairs: &[LabeledPair], lambda: T) -> Result<T> {
    check_pairs(model, pairs)?;
    let mut loss = T::zero();
    let mut users = BTreeSet::new();
    let mut items = BTreeSet::new();
    for p in pairs {
        let x = dot(model.user(p.user as usize), model.item(p.item as usize));
        loss = loss + if p.positive { softplus(-x) } else { softplus(x) };
        users.insert(p.user as usize);
        items.insert(p.item as usize);
    }
    let penalty = users.iter().map(|&u| squared_norm(model.user(u))).chain(items.iter().map(|&i| squared_norm(model.item(i))));
    Ok(penalty.fold(loss, |acc, n| acc + lambda * n))
}

/// Loss as in [`batch_loss`] together with its gradient, laid out like the
/// model (rows not touched by `pairs` are zero).
pub fn batch_gradients<T: Float>(model: &Embeddings<T>, pairs: &[LabeledPair], lambda: T) -> Result<(T, Embeddings<T>)> {
    let loss = batch_loss(model, pairs, lambda)?;
    let mut grad = Embeddings::zeros(model.user_count(), model.item_count(), model.dim());
    let mut users = BTreeSet::new();
    let mut items = BTreeSet::new();
    for p in pairs {
        let (u, i) = (p.user as usize, p.item as usize);
        let x = dot(model.user(u), model.item(i));
        let label = if p.positive { T::one() } else { T::zero() };
        let coeff = sigmoid(x) - label;
        for (g, &w) in grad.user_mut(u).iter_mut().zip(model.item(i)) {
            *g = *g + coeff * w;
        }
        for (g, &w) in grad.item_mut(i).iter_mut().zip(model.user(u)) {
            *g = *g + coeff * w;
        }
        users.insert(u);
        items.insert(i);
    }
    let two_lambda = lambda + lambda;
    for u in users {
        for (g, &w) in grad.user_mut(u).iter_mut().zip(model.user(u)) {
            *g = *g + two_lambda * w;
        }
    }
    for i in items {
        for (g, &w) in grad.item_mut(i).iter_mut().zip(model.item(i)) {
            *g = *g + two_lambda * w;
        }
    }
    Ok((loss, grad))
}

/// Gradient of one training step's loss with respect to the rows it touches.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient<T> {
    pub loss: T,
    pub user: Vec<T>,
    /// Distinct touched items (positive first) with their gradients.
    pub items: Vec<(u32, Vec<T>)>,
}

/// Loss and gradient for a positive item against a list of negatives:
/// `−log φ(u,pos) − Σ_j log(1 − φ(u,j))` plus `λ‖row‖²` per distinct touched
/// row.
pub fn pair_gradient<T: Float>(
    model: &Embeddings<T>,
    user: usize,
    positive: u32,
    negatives: &[u32],
    lambda: T,
) -> Result<PairGradient<T>> {
    model.check_user(user)?;
    for &i in std::iter::once(&positive).chain(negatives) {
        model.check_item(i as usize)?;
    }
    let mut kernel = PairKernel::new(model.dim());
    kernel.collect(positive, negatives);
    kernel.user.copy_from_slice(model.user(user));
    for k in 0..kernel.items.len() {
        let item = kernel.items[k] as usize;
        kernel.row_mut(k).copy_from_slice(model.item(item));
    }
    let loss = kernel.evaluate(lambda);
    let items = (0..kernel.items.len()).map(|k| (kernel.items[k], kernel.item_grad(k).to_vec())).collect();
    Ok(PairGradient { loss, user: kernel.user_grad.clone(), items })
}

/// Scratch space for one pair step: the caller loads the user row and the
/// rows of `items`, then [`PairKernel::evaluate`] fills the gradients.
#[derive(Debug, Clone)]
pub(crate) struct PairKernel<T> {
    dim: usize,
    pub(crate) user: Vec<T>,
    pub(crate) items: Vec<u32>,
    /// (positive count, negative count) per distinct item.
    counts: Vec<(u32, u32)>,
    rows: Vec<T>,
    pub(crate) user_grad: Vec<T>,
    item_grads: Vec<T>,
}

impl<T: Float> PairKernel<T> {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            dim,
            user: vec![T::zero(); dim],
            items: Vec::new(),
            counts: Vec::new(),
            rows: Vec::new(),
            user_grad: vec![T::zero(); dim],
            item_grads: Vec::new(),
        }
    }

    pub(crate) fn collect(&mut self, positive: u32, negatives: &[u32]) {
        self.items.clear();
        self.counts.clear();
        self.items.push(positive);
        self.counts.push((1, 0));
        for &j in negatives {
            match self.items.iter().position(|&x| x == j) {
                Some(k) => self.counts[k].1 += 1,
                None => {
                    self.items.push(j);
                    self.counts.push((0, 1));
                }
            }
        }
        let n = self.items.len() * self.dim;
        self.rows.resize(n, T::zero());
        self.item_grads.resize(n, T::zero());
    }

    pub(crate) fn row_mut(&mut self, k: usize) -> &mut [T] {
        &mut self.rows[k * self.dim..(k + 1) * self.dim]
    }

    pub(crate) fn item_grad(&self, k: usize) -> &[T] {
        &self.item_grads[k * self.dim..(k + 1) * self.dim]
    }

    /// Returns the loss; gradients end up in `user_grad` / `item_grad(k)`.
    pub(crate) fn evaluate(&mut self, lambda: T) -> T {
        let dim = self.dim;
        let two_lambda = lambda + lambda;
        let mut loss = lambda * squared_norm(&self.user);
        for (g, &w) in self.user_grad.iter_mut().zip(&self.user) {
            *g = two_lambda * w;
        }
        for (k, &(pos, neg)) in self.counts.iter().enumerate() {
            let row = &self.rows[k * dim..(k + 1) * dim];
            let x = dot(&self.user, row);
            let (pos, neg) = (T::from(pos).unwrap(), T::from(neg).unwrap());
            loss = loss + pos * softplus(-x) + neg * softplus(x) + lambda * squared_norm(row);
            let coeff = (pos + neg) * sigmoid(x) - pos;
            let grad = &mut self.item_grads[k * dim..(k + 1) * dim];
            for ((g, &uw), &rw) in grad.iter_mut().zip(&self.user).zip(row) {
                *g = coeff * uw + two_lambda * rw;
            }
            for (g, &rw) in self.user_grad.iter_mut().zip(row) {
                *g = *g + coeff * rw;
            }
        }
        loss
    }

    pub(crate) fn gradients_finite(&self) -> bool {
        self.user_grad.iter().chain(&self.item_grads).all(|g| g.is_finite())
    }
}
