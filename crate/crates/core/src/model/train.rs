use rand::seq::SliceRandom;
use rand::Rng;

use super::adam::{atomic_f32, atomic_u32, AdamParams, Cells, Counters, OptimizerState, Side};
use super::objective::PairKernel;
use super::{init_model, EmbeddingModel, TrainConfig};
use crate::dataset::InteractionDataset;
use crate::error::{Error, Result};
use crate::sampling::{Exclusion, NegativeSampler, Subsampler};
use crate::seed::{self, Stream};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Positive pairs trained on after subsampling.
    pub pairs: usize,
    pub mean_loss: f64,
    /// No interaction survived subsampling, so no update happened.
    pub skipped: bool,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: EmbeddingModel,
    pub trace: Vec<EpochStats>,
}

/// Per-thread buffers for one training step.
struct Scratch {
    kernel: PairKernel<f64>,
    negatives: Vec<u32>,
}

impl Scratch {
    fn new(dim: usize, negatives: usize) -> Self {
        Self { kernel: PairKernel::new(dim), negatives: Vec::with_capacity(negatives) }
    }
}

/// Computes the loss of one positive against its negatives, then steps the
/// user row and every distinct item row. Returns the pre-update loss.
#[allow(clippy::too_many_arguments)]
fn step<C: Cells, S: Counters>(
    users: &mut Side<C, S>,
    items: &mut Side<C, S>,
    kernel: &mut PairKernel<f64>,
    user: usize,
    positive: u32,
    negatives: &[u32],
    lambda: f64,
    lr: f64,
    adam: &AdamParams,
) -> std::result::Result<f64, String> {
    kernel.collect(positive, negatives);
    users.load(user, &mut kernel.user);
    for k in 0..kernel.items.len() {
        let item = kernel.items[k] as usize;
        items.load(item, kernel.row_mut(k));
    }
    let loss = kernel.evaluate(lambda);
    if !loss.is_finite() {
        return Err(format!("loss is {loss}"));
    }
    if !kernel.gradients_finite() {
        return Err("gradient has non-finite entries".into());
    }
    users.update(user, &kernel.user_grad, lr, adam);
    for k in 0..kernel.items.len() {
        items.update(kernel.items[k] as usize, kernel.item_grad(k), lr, adam);
    }
    Ok(loss)
}

type PlainSide<'a> = Side<&'a mut [f32], &'a mut [u32]>;

fn plain_sides<'a>(model: &'a mut EmbeddingModel, opt: &'a mut OptimizerState) -> (PlainSide<'a>, PlainSide<'a>) {
    let dim = model.dim();
    let users = Side {
        params: &mut model.users[..],
        m: &mut opt.user_m[..],
        v: &mut opt.user_v[..],
        steps: &mut opt.user_steps[..],
        dim,
    };
    let items = Side {
        params: &mut model.items[..],
        m: &mut opt.item_m[..],
        v: &mut opt.item_v[..],
        steps: &mut opt.item_steps[..],
        dim,
    };
    (users, items)
}

fn check_shapes(model: &EmbeddingModel, opt: &OptimizerState) -> Result<()> {
    if opt.user_m.len() != model.user_matrix().len() {
        return Err(Error::DimensionMismatch { left: opt.user_m.len(), right: model.user_matrix().len() });
    }
    if opt.item_m.len() != model.item_matrix().len() {
        return Err(Error::DimensionMismatch { left: opt.item_m.len(), right: model.item_matrix().len() });
    }
    Ok(())
}

/// Single Adam step on one positive pair and its negatives. Returns the loss
/// evaluated before the update.
pub fn train_pair(
    model: &mut EmbeddingModel,
    opt: &mut OptimizerState,
    user: usize,
    positive: u32,
    negatives: &[u32],
    cfg: &TrainConfig,
) -> Result<f64> {
    model.check_user(user)?;
    for &i in std::iter::once(&positive).chain(negatives) {
        model.check_item(i as usize)?;
    }
    if negatives.contains(&positive) {
        return Err(Error::config(format!("negatives contain the positive item {positive}")));
    }
    check_shapes(model, opt)?;
    let mut kernel = PairKernel::new(model.dim());
    let adam = opt.params;
    let (mut users, mut items) = plain_sides(model, opt);
    step(&mut users, &mut items, &mut kernel, user, positive, negatives, cfg.regularization, cfg.learning_rate, &adam)
        .map_err(|message| Error::NonFinite { epoch: 0, user, item: positive as usize, message })
}

/// Epoch-at-a-time trainer over one dataset.
pub struct Trainer<'a> {
    ds: &'a InteractionDataset,
    cfg: TrainConfig,
    model: EmbeddingModel,
    opt: OptimizerState,
    subsampler: Subsampler,
    sampler: NegativeSampler,
    epoch: usize,
}

impl<'a> Trainer<'a> {
    pub fn new(ds: &'a InteractionDataset, cfg: &TrainConfig) -> Result<Self> {
        cfg.validate()?;
        if ds.interaction_count() == 0 {
            return Err(Error::DatasetExhausted);
        }
        let model = init_model(ds.user_count(), ds.item_count(), cfg.dim, cfg.seed)?;
        let opt = OptimizerState::new(&model);
        let subsampler = Subsampler::new(ds, &cfg.subsampler())?;
        let sampler = NegativeSampler::from_dataset(ds, cfg.neg_exponent)?;
        if cfg.negatives > 0 && ds.item_count() < 2 {
            return Err(Error::config("negative sampling needs at least two items"));
        }
        Ok(Self { ds, cfg: cfg.clone(), model, opt, subsampler, sampler, epoch: 0 })
    }

    pub fn model(&self) -> &EmbeddingModel {
        &self.model
    }

    pub fn optimizer(&self) -> &OptimizerState {
        &self.opt
    }

    pub fn epochs_done(&self) -> usize {
        self.epoch
    }

    pub fn run_epoch(&mut self) -> Result<EpochStats> {
        let epoch = self.epoch;
        self.epoch += 1;
        let mut rng = seed::rng(self.cfg.seed, Stream::Epoch, epoch as u64);
        let mut view = self.subsampler.epoch_view(self.ds, &mut rng);
        if view.is_empty() {
            return Ok(EpochStats { epoch, pairs: 0, mean_loss: f64::NAN, skipped: true });
        }
        view.shuffle(&mut rng);
        let total = if self.cfg.parallel_workers == 0 {
            self.serial_epoch(&view, &mut rng, epoch)?
        } else {
            self.parallel_epoch(&view, epoch)?
        };
        Ok(EpochStats { epoch, pairs: view.len(), mean_loss: total / view.len() as f64, skipped: false })
    }

    fn serial_epoch<R: Rng>(&mut self, view: &[(u32, u32)], rng: &mut R, epoch: usize) -> Result<f64> {
        let ctx = EpochContext { ds: self.ds, cfg: &self.cfg, sampler: &self.sampler, adam: self.opt.params, epoch };
        let mut scratch = Scratch::new(self.model.dim(), self.cfg.negatives);
        let (mut users, mut items) = plain_sides(&mut self.model, &mut self.opt);
        ctx.run(view, &mut users, &mut items, &mut scratch, rng)
    }

    fn parallel_epoch(&mut self, view: &[(u32, u32)], epoch: usize) -> Result<f64> {
        let workers = self.cfg.parallel_workers.min(view.len()).max(1);
        let ctx = EpochContext { ds: self.ds, cfg: &self.cfg, sampler: &self.sampler, adam: self.opt.params, epoch };
        let dim = self.model.dim();
        let users = (
            atomic_f32(&mut self.model.users),
            atomic_f32(&mut self.opt.user_m),
            atomic_f32(&mut self.opt.user_v),
            atomic_u32(&mut self.opt.user_steps),
        );
        let items = (
            atomic_f32(&mut self.model.items),
            atomic_f32(&mut self.opt.item_m),
            atomic_f32(&mut self.opt.item_v),
            atomic_u32(&mut self.opt.item_steps),
        );
        let chunk = view.len().div_ceil(workers);
        let results: Vec<Result<f64>> = std::thread::scope(|scope| {
            let handles: Vec<_> = view
                .chunks(chunk)
                .enumerate()
                .map(|(w, shard)| {
                    let ctx = &ctx;
                    scope.spawn(move || {
                        let mut u = Side { params: users.0, m: users.1, v: users.2, steps: users.3, dim };
                        let mut i = Side { params: items.0, m: items.1, v: items.2, steps: items.3, dim };
                        let index = (epoch as u64) << 16 | w as u64;
                        let mut rng = seed::rng(ctx.cfg.seed, Stream::Worker, index);
                        let mut scratch = Scratch::new(dim, ctx.cfg.negatives);
                        ctx.run(shard, &mut u, &mut i, &mut scratch, &mut rng)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("training worker panicked")).collect()
        });
        results.into_iter().sum()
    }

    pub fn finish(self) -> EmbeddingModel {
        self.model
    }
}

struct EpochContext<'a> {
    ds: &'a InteractionDataset,
    cfg: &'a TrainConfig,
    sampler: &'a NegativeSampler,
    adam: AdamParams,
    epoch: usize,
}

impl EpochContext<'_> {
    fn run<C: Cells, S: Counters, R: Rng>(
        &self,
        view: &[(u32, u32)],
        users: &mut Side<C, S>,
        items: &mut Side<C, S>,
        scratch: &mut Scratch,
        rng: &mut R,
    ) -> Result<f64> {
        let mut total = 0.0;
        for &(u, i) in view {
            let exclusion =
                if self.cfg.exclude_history { Exclusion::Sorted(self.ds.user_items(u as usize)) } else { Exclusion::Item(i) };
            scratch.negatives.clear();
            self.sampler.fill_negatives(exclusion, self.cfg.negatives, rng, &mut scratch.negatives)?;
            let loss = step(
                users,
                items,
                &mut scratch.kernel,
                u as usize,
                i,
                &scratch.negatives,
                self.cfg.regularization,
                self.cfg.learning_rate,
                &self.adam,
            )
            .map_err(|message| Error::NonFinite {
                epoch: self.epoch,
                user: u as usize,
                item: i as usize,
                message,
            })?;
            total += loss;
        }
        Ok(total)
    }
}

/// Trains for `cfg.epochs` epochs from a fresh initialisation.
pub fn train(ds: &InteractionDataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    let mut trainer = Trainer::new(ds, cfg)?;
    let trace = (0..cfg.epochs).map(|_| trainer.run_epoch()).collect::<Result<Vec<_>>>()?;
    Ok(TrainOutcome { model: trainer.finish(), trace })
}
