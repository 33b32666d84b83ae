use std::sync::atomic::{AtomicU32, Ordering};

use super::EmbeddingModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamParams {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        Self { beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// First and second moments shaped like the model, plus a step counter per
/// row. Rows are updated lazily, so bias correction uses the number of times
/// that row has been stepped.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub params: AdamParams,
    pub(crate) user_m: Vec<f32>,
    pub(crate) user_v: Vec<f32>,
    pub(crate) item_m: Vec<f32>,
    pub(crate) item_v: Vec<f32>,
    pub(crate) user_steps: Vec<u32>,
    pub(crate) item_steps: Vec<u32>,
}

impl OptimizerState {
    pub fn new(model: &EmbeddingModel) -> Self {
        let users = model.user_matrix().len();
        let items = model.item_matrix().len();
        Self {
            params: AdamParams::default(),
            user_m: vec![0.0; users],
            user_v: vec![0.0; users],
            item_m: vec![0.0; items],
            item_v: vec![0.0; items],
            user_steps: vec![0; model.user_count()],
            item_steps: vec![0; model.item_count()],
        }
    }

    /// Total row updates applied so far.
    pub fn steps(&self) -> u64 {
        self.user_steps.iter().chain(&self.item_steps).map(|&s| s as u64).sum()
    }

    pub fn user_steps(&self, u: usize) -> u32 {
        self.user_steps[u]
    }

    pub fn item_steps(&self, i: usize) -> u32 {
        self.item_steps[i]
    }

    pub fn moments_finite(&self) -> bool {
        [&self.user_m, &self.user_v, &self.item_m, &self.item_v].iter().all(|v| v.iter().all(|x| x.is_finite()))
    }
}

/// Scalar storage the update rule reads and writes.
pub(crate) trait Cells {
    fn get(&self, k: usize) -> f32;
    fn set(&mut self, k: usize, value: f32);
}

impl Cells for &mut [f32] {
    fn get(&self, k: usize) -> f32 {
        self[k]
    }

    fn set(&mut self, k: usize, value: f32) {
        self[k] = value;
    }
}

/// Lock-free shared storage: f32 bits in relaxed atomics.
impl Cells for &[AtomicU32] {
    fn get(&self, k: usize) -> f32 {
        f32::from_bits(self[k].load(Ordering::Relaxed))
    }

    fn set(&mut self, k: usize, value: f32) {
        self[k].store(value.to_bits(), Ordering::Relaxed);
    }
}

pub(crate) trait Counters {
    /// Increments row `k`'s counter and returns the new value.
    fn bump(&mut self, k: usize) -> u32;
}

impl Counters for &mut [u32] {
    fn bump(&mut self, k: usize) -> u32 {
        self[k] += 1;
        self[k]
    }
}

impl Counters for &[AtomicU32] {
    fn bump(&mut self, k: usize) -> u32 {
        self[k].fetch_add(1, Ordering::Relaxed) + 1
    }
}

pub(crate) fn atomic_f32(values: &mut [f32]) -> &[AtomicU32] {
    // SAFETY: AtomicU32 has the size and alignment of u32 and f32, and the
    // exclusive borrow guarantees no other access for the returned lifetime.
    unsafe { &*(values as *mut [f32] as *const [AtomicU32]) }
}

pub(crate) fn atomic_u32(values: &mut [u32]) -> &[AtomicU32] {
    // SAFETY: as above.
    unsafe { &*(values as *mut [u32] as *const [AtomicU32]) }
}

/// One matrix together with its Adam state.
pub(crate) struct Side<C, S> {
    pub(crate) params: C,
    pub(crate) m: C,
    pub(crate) v: C,
    pub(crate) steps: S,
    pub(crate) dim: usize,
}

impl<C: Cells, S: Counters> Side<C, S> {
    pub(crate) fn load(&self, row: usize, out: &mut [f64]) {
        let base = row * self.dim;
        for (d, x) in out.iter_mut().enumerate() {
            *x = self.params.get(base + d) as f64;
        }
    }

    pub(crate) fn update(&mut self, row: usize, grad: &[f64], lr: f64, adam: &AdamParams) {
        let t = self.steps.bump(row) as i32;
        let bc1 = 1.0 - adam.beta1.powi(t);
        let bc2 = 1.0 - adam.beta2.powi(t);
        let base = row * self.dim;
        for (d, &g) in grad.iter().enumerate() {
            let k = base + d;
            let m = adam.beta1 * self.m.get(k) as f64 + (1.0 - adam.beta1) * g;
            let v = adam.beta2 * self.v.get(k) as f64 + (1.0 - adam.beta2) * g * g;
            self.m.set(k, m as f32);
            self.v.set(k, v as f32);
            let step = lr * (m / bc1) / ((v / bc2).sqrt() + adam.eps);
            self.params.set(k, (self.params.get(k) as f64 - step) as f32);
        }
    }
}
