use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::{evaluate, EarlyStopping, TaskMetric};
use crate::data::{DatasetBundle, Rows};
use crate::model::{Batch, LossWeights, LsmModel, Net, Session, Term};
use crate::nn::AdamState;
use crate::rng::{self, streams};
use crate::{Error, Result, Tensor};

/// Which data the early-stopping monitor scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monitor {
    /// Task metric on the validation pairs.
    Validation,
    /// Task metric on the paired training bank.
    TrainPaired,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub lr: f64,
    pub batch_paired: usize,
    pub batch_x: usize,
    pub batch_y: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub weights: LossWeights,
    /// Seeds the batch order; model initialization is seeded separately.
    pub seed: u64,
    pub metric: TaskMetric,
    pub monitor: Monitor,
    /// Stop as soon as the monitored value reaches this level.
    pub target: Option<f64>,
}

impl TrainConfig {
    pub fn new(metric: TaskMetric) -> Self {
        TrainConfig {
            lr: 1e-3,
            batch_paired: 16,
            batch_x: 16,
            batch_y: 16,
            max_epochs: 1000,
            patience: 100,
            weights: LossWeights::lsm(),
            seed: 0,
            metric,
            monitor: Monitor::Validation,
            target: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lr.is_finite() && self.lr >= 0.0) {
            return Err(Error::invalid("learning rate must be finite and non-negative"));
        }
        if self.batch_paired == 0 || self.batch_x == 0 || self.batch_y == 0 {
            return Err(Error::invalid("batch sizes must be at least 1"));
        }
        if self.max_epochs == 0 || self.patience > self.max_epochs {
            return Err(Error::invalid("need 1 <= max_epochs and patience <= max_epochs"));
        }
        self.weights.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Patience,
    Budget,
    Target,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::Patience => "patience",
            StopReason::Budget => "budget",
            StopReason::Target => "target",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochLog {
    /// 1-indexed.
    pub epoch: usize,
    /// Mean value of every term computed this epoch, in [`Term::ALL`] order.
    pub terms: Vec<(Term, f64)>,
    pub main_loss: Option<f64>,
    pub monitored: Option<f64>,
    pub main_updates: usize,
    pub dc_updates: usize,
}

impl EpochLog {
    pub fn term(&self, t: Term) -> Option<f64> {
        self.terms.iter().find(|(k, _)| *k == t).map(|&(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct History {
    pub epochs: Vec<EpochLog>,
    /// Epoch whose parameters were returned; 0 means the initial ones.
    pub best_epoch: usize,
    pub best_value: Option<f64>,
    /// What the monitor scored: a metric name, or `train_loss`.
    pub monitor: String,
    pub maximize: bool,
    pub stop: StopReason,
    pub main_updates: usize,
    pub dc_updates: usize,
    pub warnings: Vec<String>,
    /// Log arguments clamped away from zero during training.
    pub clamp_events: usize,
}

impl History {
    pub fn stopped_epoch(&self) -> usize {
        self.epochs.last().map_or(0, |e| e.epoch)
    }
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub model: LsmModel,
    pub history: History,
}

/// Shuffled cursor over one bank. Batches never straddle two permutations,
/// so a bank of `n` rows yields `ceil(n / b)` batches per pass.
struct Sampler {
    order: Vec<usize>,
    cursor: usize,
    rng: rng::Rng,
}

impl Sampler {
    fn new(len: usize, seed: u64, stream: u64) -> Self {
        let mut rng = rng::stream(seed, stream);
        let mut order: Vec<usize> = (0..len).collect();
        order.shuffle(&mut rng);
        Sampler { order, cursor: 0, rng }
    }

    fn next(&mut self, batch: usize) -> &[usize] {
        if self.cursor >= self.order.len() {
            self.order.shuffle(&mut self.rng);
            self.cursor = 0;
        }
        let start = self.cursor;
        self.cursor = (start + batch).min(self.order.len());
        &self.order[start..self.cursor]
    }

    fn passes(&self, batch: usize) -> usize {
        self.order.len().div_ceil(batch)
    }
}

fn rows_batch(rows: &Rows, idx: &[usize]) -> Result<Tensor> {
    rows.gather(idx)
}

fn diverged(epoch: usize, step: usize, e: Error, last: Option<f64>) -> Error {
    match e {
        Error::NonFinite { .. } | Error::NonFiniteGradient { .. } => Error::Diverged {
            epoch,
            step,
            detail: alloc::format!("{e}; last finite main loss {last:?}"),
        },
        other => other,
    }
}

/// Trains `model` on `bundle` and returns the parameters of the best
/// monitored epoch.
///
/// Each step draws one batch from every bank the weights use, applies an
/// Adam update of the six main networks on the weighted main loss, then,
/// when confusion is active and both unpaired banks are non-empty, an Adam
/// update of the two classifiers on their own loss. Classifier terms see
/// codes detached from the generator, and the confusion term sees frozen
/// classifiers, so the two updates touch disjoint parameters.
pub fn fit(mut model: LsmModel, bundle: &DatasetBundle, config: &TrainConfig) -> Result<FitOutcome> {
    config.validate()?;
    bundle.validate()?;
    if !bundle.has_training_data() {
        return Err(Error::EmptyBatch("every training bank is empty"));
    }
    let w = config.weights;
    let mut warnings = Vec::new();
    let sup = w.sup_xy > 0.0 || w.sup_yx > 0.0;
    if bundle.paired.is_empty() && (sup || w.distance > 0.0) {
        warnings.push("paired bank is empty: supervised and distance terms skipped".to_string());
    }
    let adversarial = w.confusion > 0.0 && !bundle.x_only.is_empty() && !bundle.y_only.is_empty();
    let use_paired = !bundle.paired.is_empty() && (sup || w.recon_x > 0.0 || w.recon_y > 0.0 || w.distance > 0.0);
    let use_x = !bundle.x_only.is_empty() && (w.recon_x > 0.0 || adversarial);
    let use_y = !bundle.y_only.is_empty() && (w.recon_y > 0.0 || adversarial);
    if !(use_paired || use_x || use_y) {
        return Err(Error::invalid("no loss term can be computed from the available banks"));
    }

    let mut paired = use_paired.then(|| Sampler::new(bundle.paired.len(), config.seed, streams::SHUFFLE_PAIRED));
    let mut sx = use_x.then(|| Sampler::new(bundle.x_only.len(), config.seed, streams::SHUFFLE_X));
    let mut sy = use_y.then(|| Sampler::new(bundle.y_only.len(), config.seed, streams::SHUFFLE_Y));
    let steps = [
        paired.as_ref().map(|s| s.passes(config.batch_paired)),
        sx.as_ref().map(|s| s.passes(config.batch_x)),
        sy.as_ref().map(|s| s.passes(config.batch_y)),
    ]
    .into_iter()
    .flatten()
    .max()
    .unwrap_or(0);

    let monitor_bank = match config.monitor {
        Monitor::Validation => &bundle.val,
        Monitor::TrainPaired => &bundle.paired,
    };
    let (monitor_name, maximize) = if monitor_bank.is_empty() {
        warnings.push("monitored bank is empty: early stopping tracks the training loss".to_string());
        ("train_loss".to_string(), false)
    } else {
        (config.metric.name().to_string(), config.metric.maximize())
    };

    let mut adam_main = AdamState::new(config.lr);
    let mut adam_dc = AdamState::new(config.lr);
    let mut stopper = EarlyStopping::new(config.patience, maximize);
    let mut best_model = model.clone();
    let mut history = History {
        epochs: Vec::new(),
        best_epoch: 0,
        best_value: None,
        monitor: monitor_name,
        maximize,
        stop: StopReason::Budget,
        main_updates: 0,
        dc_updates: 0,
        warnings,
        clamp_events: 0,
    };
    let mut last_main = None;
    let mut warned_skip = false;

    for epoch in 1..=config.max_epochs {
        let mut sums = [(0.0f64, 0usize); Term::ALL.len()];
        let (mut main_sum, mut main_n) = (0.0, 0usize);
        let (mut main_updates, mut dc_updates) = (0, 0);
        for step in 0..steps {
            let mut batches = Vec::with_capacity(3);
            if let Some(s) = paired.as_mut() {
                let idx = s.next(config.batch_paired);
                batches.push(Batch::paired(rows_batch(&bundle.paired.x, idx)?, rows_batch(&bundle.paired.y, idx)?)?);
            }
            if let Some(s) = sx.as_mut() {
                batches.push(Batch::only_x(rows_batch(&bundle.x_only.rows, s.next(config.batch_x))?)?);
            }
            if let Some(s) = sy.as_mut() {
                batches.push(Batch::only_y(rows_batch(&bundle.y_only.rows, s.next(config.batch_y))?)?);
            }

            let (main_grads, dc_grads) = {
                let mut session = Session::new(&model, true);
                let graph = session
                    .build_step(&w, &batches, adversarial)
                    .map_err(|e| diverged(epoch, step, e, last_main))?;
                for &(t, id) in &graph.terms {
                    let v = session.graph.scalar(id).expect("loss terms are scalars");
                    let slot = &mut sums[Term::ALL.iter().position(|k| *k == t).expect("known term")];
                    slot.0 += v;
                    slot.1 += 1;
                }
                let main = match graph.main {
                    Some(id) => {
                        let v = session.graph.scalar(id).expect("scalar");
                        main_sum += v;
                        main_n += 1;
                        last_main = Some(v);
                        let mut g = session.graph.backward(id).map_err(|e| diverged(epoch, step, e, last_main))?;
                        Some(session.collect_grads(&mut g, &Net::MAIN))
                    }
                    None => None,
                };
                let dc = match graph.adversarial {
                    Some(id) => {
                        let mut g = session.graph.backward(id).map_err(|e| diverged(epoch, step, e, last_main))?;
                        Some(session.collect_grads(&mut g, &Net::CLASSIFIERS))
                    }
                    None => None,
                };
                history.clamp_events += session.graph.clamp_events();
                (main, dc)
            };

            match main_grads {
                Some(grads) => {
                    let refs: Vec<Option<&[f64]>> = grads.iter().map(|g| g.as_deref()).collect();
                    adam_main
                        .step(&mut model.params_mut(&Net::MAIN), &refs)
                        .map_err(|e| diverged(epoch, step, e, last_main))?;
                    main_updates += 1;
                }
                None if !warned_skip => {
                    warned_skip = true;
                    history.warnings.push(alloc::format!(
                        "epoch {epoch} step {step}: no main loss term was computable; main update skipped"
                    ));
                }
                None => {}
            }
            if let Some(grads) = dc_grads {
                let refs: Vec<Option<&[f64]>> = grads.iter().map(|g| g.as_deref()).collect();
                adam_dc
                    .step(&mut model.params_mut(&Net::CLASSIFIERS), &refs)
                    .map_err(|e| diverged(epoch, step, e, last_main))?;
                dc_updates += 1;
            }
        }

        let main_loss = (main_n > 0).then(|| main_sum / main_n as f64);
        let monitored = if history.monitor == "train_loss" {
            main_loss
        } else {
            evaluate(&model, monitor_bank, config.metric)?
        };
        let obs = stopper.observe(epoch, monitored);
        if obs.improved {
            best_model = model.clone();
            history.best_epoch = epoch;
            history.best_value = monitored;
        }
        history.main_updates += main_updates;
        history.dc_updates += dc_updates;
        history.epochs.push(EpochLog {
            epoch,
            terms: Term::ALL
                .iter()
                .zip(sums)
                .filter(|(_, (_, n))| *n > 0)
                .map(|(t, (s, n))| (*t, s / n as f64))
                .collect(),
            main_loss,
            monitored,
            main_updates,
            dc_updates,
        });
        let reached = match (config.target, monitored) {
            (Some(t), Some(v)) => (maximize && v >= t) || (!maximize && v <= t),
            _ => false,
        };
        if reached {
            history.stop = StopReason::Target;
            break;
        }
        if obs.stop {
            history.stop = StopReason::Patience;
            break;
        }
    }
    Ok(FitOutcome {
        model: best_model,
        history,
    })
}

/// Autoencoder pre-training schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct PretrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub batch: usize,
    pub seed: u64,
}

/// Trains only the encoders and decoders to reconstruct every available view
/// of each domain (paired and unpaired). Link and classifier parameters are
/// never bound, so they are left untouched. Returns the mean reconstruction
/// loss per epoch.
pub fn ioda_pretrain(model: &mut LsmModel, bundle: &DatasetBundle, config: &PretrainConfig) -> Result<Vec<f64>> {
    if config.batch == 0 || !(config.lr.is_finite() && config.lr >= 0.0) {
        return Err(Error::invalid("pre-training needs a positive batch and a finite learning rate"));
    }
    let mut xs = bundle.paired.x.clone();
    for i in 0..bundle.x_only.len() {
        xs.push(bundle.x_only.rows.row(i))?;
    }
    let mut ys = bundle.paired.y.clone();
    for i in 0..bundle.y_only.len() {
        ys.push(bundle.y_only.rows.row(i))?;
    }
    let seed = rng::derive_seed(config.seed, streams::PRETRAIN);
    let mut sx = (!xs.is_empty()).then(|| Sampler::new(xs.len(), seed, streams::SHUFFLE_X));
    let mut sy = (!ys.is_empty()).then(|| Sampler::new(ys.len(), seed, streams::SHUFFLE_Y));
    let steps = [sx.as_ref(), sy.as_ref()]
        .into_iter()
        .flatten()
        .map(|s| s.passes(config.batch))
        .max()
        .ok_or(Error::EmptyBatch("no views to pre-train on"))?;
    let nets = [Net::EncoderX, Net::EncoderY, Net::DecoderX, Net::DecoderY];
    let w = LossWeights {
        recon_x: 1.0,
        recon_y: 1.0,
        ..LossWeights::zero()
    };
    let mut adam = AdamState::new(config.lr);
    let mut curve = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        let (mut sum, mut n) = (0.0, 0usize);
        for step in 0..steps {
            let mut batches = Vec::with_capacity(2);
            if let Some(s) = sx.as_mut() {
                batches.push(Batch::only_x(xs.gather(s.next(config.batch))?)?);
            }
            if let Some(s) = sy.as_mut() {
                batches.push(Batch::only_y(ys.gather(s.next(config.batch))?)?);
            }
            let grads = {
                let mut session = Session::new(model, true);
                let graph = session.build_step(&w, &batches, false).map_err(|e| diverged(epoch, step, e, None))?;
                let main = graph.main.expect("reconstruction terms are weighted");
                sum += session.graph.scalar(main).expect("scalar");
                n += 1;
                let mut g = session.graph.backward(main).map_err(|e| diverged(epoch, step, e, None))?;
                session.collect_grads(&mut g, &nets)
            };
            let refs: Vec<Option<&[f64]>> = grads.iter().map(|g| g.as_deref()).collect();
            adam.step(&mut model.params_mut(&nets), &refs)
                .map_err(|e| diverged(epoch, step, e, None))?;
        }
        curve.push(sum / n as f64);
    }
    Ok(curve)
}

/// Autoencoder pre-training followed by supervised fine-tuning of the whole
/// translation path with `config` (whose weights are replaced by the basic
/// supervised ones).
pub fn ioda(mut model: LsmModel, bundle: &DatasetBundle, config: &TrainConfig, pretrain: &PretrainConfig) -> Result<FitOutcome> {
    ioda_pretrain(&mut model, bundle, pretrain)?;
    let finetune = TrainConfig {
        weights: LossWeights::basic(),
        ..config.clone()
    };
    fit(model, bundle, &finetune)
}
