use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::{self, Stream};

/// User matrix (`|U|` rows) and item matrix (`|I|` rows, item-major), both
/// row-major with `dim` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Embeddings<T> {
    user_count: usize,
    item_count: usize,
    dim: usize,
    pub(crate) users: Vec<T>,
    pub(crate) items: Vec<T>,
}

pub type EmbeddingModel = Embeddings<f32>;

impl<T: Float> Embeddings<T> {
    pub fn from_parts(user_count: usize, item_count: usize, dim: usize, users: Vec<T>, items: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("embedding dimension must be at least 1"));
        }
        if users.len() != user_count * dim {
            return Err(Error::DimensionMismatch { left: users.len(), right: user_count * dim });
        }
        if items.len() != item_count * dim {
            return Err(Error::DimensionMismatch { left: items.len(), right: item_count * dim });
        }
        Ok(Self { user_count, item_count, dim, users, items })
    }

    pub fn zeros(user_count: usize, item_count: usize, dim: usize) -> Self {
        Self { user_count, item_count, dim, users: vec![T::zero(); user_count * dim], items: vec![T::zero(); item_count * dim] }
    }

    pub fn user_count(&self) -> usize {
        self.user_count
    }

    pub fn item_count(&self) -> usize {
        self.item_count
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn user(&self, u: usize) -> &[T] {
        &self.users[u * self.dim..(u + 1) * self.dim]
    }

    pub fn item(&self, i: usize) -> &[T] {
        &self.items[i * self.dim..(i + 1) * self.dim]
    }

    pub fn user_mut(&mut self, u: usize) -> &mut [T] {
        &mut self.users[u * self.dim..(u + 1) * self.dim]
    }

    pub fn item_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.items[i * self.dim..(i + 1) * self.dim]
    }

    pub fn user_matrix(&self) -> &[T] {
        &self.users
    }

    pub fn item_matrix(&self) -> &[T] {
        &self.items
    }

    pub fn is_finite(&self) -> bool {
        self.users.iter().chain(&self.items).all(|x| x.is_finite())
    }

    pub(crate) fn check_user(&self, u: usize) -> Result<()> {
        if u < self.user_count {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { what: "user", index: u, len: self.user_count })
        }
    }

    pub(crate) fn check_item(&self, i: usize) -> Result<()> {
        if i < self.item_count {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { what: "item", index: i, len: self.item_count })
        }
    }

    pub fn cast<U: Float>(&self) -> Embeddings<U> {
        let conv = |v: &[T]| v.iter().map(|x| U::from(*x).unwrap()).collect();
        Embeddings {
            user_count: self.user_count,
            item_count: self.item_count,
            dim: self.dim,
            users: conv(&self.users),
            items: conv(&self.items),
        }
    }
}

/// Fresh model with every entry i.i.d. uniform on the open interval
/// `(-0.5/M, 0.5/M)`.
pub fn init_model(user_count: usize, item_count: usize, dim: usize, seed: u64) -> Result<EmbeddingModel> {
    if user_count == 0 || item_count == 0 {
        return Err(Error::config("cannot initialise a model without users and items"));
    }
    if dim == 0 {
        return Err(Error::config("embedding dimension must be at least 1"));
    }
    let bound = 0.5f32 / dim as f32;
    let mut rng = seed::rng(seed, Stream::Init, 0);
    let mut draw = |n: usize| -> Vec<f32> {
        (0..n)
            .map(|_| loop {
                let x = rng.random_range(-bound..bound);
                if x > -bound {
                    break x;
                }
            })
            .collect()
    };
    let users = draw(user_count * dim);
    let items = draw(item_count * dim);
    Embeddings::from_parts(user_count, item_count, dim, users, items)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_is_deterministic_and_bounded() {
        let a = init_model(7, 9, 100, 3).unwrap();
        let b = init_model(7, 9, 100, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, init_model(7, 9, 100, 4).unwrap());
        let bound = 0.5 / 100.0;
        assert!(a.user_matrix().iter().chain(a.item_matrix()).all(|x| x.abs() < bound));
    }

    #[test]
    fn init_shape() {
        let m = init_model(3, 3, 4, 0).unwrap();
        assert_eq!(m.user_matrix().len() + m.item_matrix().len(), 24);
        assert!(m.is_finite());
        assert_eq!(m.item(2).len(), 4);
    }

    #[test]
    fn init_rejects_empty() {
        assert!(init_model(0, 3, 4, 0).is_err());
        assert!(init_model(3, 0, 4, 0).is_err());
        assert!(init_model(3, 3, 0, 0).is_err());
    }

    #[test]
    fn from_parts_checks_lengths() {
        assert!(Embeddings::<f64>::from_parts(2, 1, 3, vec![0.0; 6], vec![0.0; 3]).is_ok());
        assert!(Embeddings::<f64>::from_parts(2, 1, 3, vec![0.0; 5], vec![0.0; 3]).is_err());
    }
}
