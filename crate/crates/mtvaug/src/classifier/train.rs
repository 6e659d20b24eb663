//! SGD training under a weighted joint objective over original and
//! augmented examples.
//!
//! Each minibatch of originals is paired with a freshly augmented copy of
//! itself, and the update direction is the weighted combination of the two
//! batch gradients. Ordering and augmentation draw from two independent
//! streams derived from the config seed, so the ordering stream is consumed
//! identically whether or not augmentation is active.

use crate::augment::{augment, AugmentationConfig};
use crate::classifier::features::featurize;
use crate::classifier::model::{
    accumulate_example, ClassifierError, GradSink, LinearModel, LossKind,
};
use crate::rng::{mix64, RandomStream};
use crate::text::{Dataset, SynonymLexicon};

/// Stream tag for example ordering (and any future init randomness).
pub const STREAM_ORDER: u64 = 0x4F52_4445_5200;
/// Stream tag for online augmentation draws.
pub const STREAM_AUGMENT: u64 = 0x4155_474D_4500;

/// Mixture weights for the original and augmented loss terms.
///
/// Constructed from `gamma_o` alone so that `gamma_o + gamma_aug == 1` holds
/// exactly. `gamma_o = 1` is vanilla training, `gamma_o = 0` is traditional
/// augmentation-only training.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixWeights {
    gamma_o: f64,
    gamma_aug: f64,
}

impl MixWeights {
    pub fn from_gamma_o(gamma_o: f64) -> Result<Self, ClassifierError> {
        if !(0.0..=1.0).contains(&gamma_o) || gamma_o.is_nan() {
            return Err(ClassifierError::InvalidGamma(gamma_o));
        }
        Ok(Self {
            gamma_o,
            gamma_aug: 1.0 - gamma_o,
        })
    }

    pub fn vanilla() -> Self {
        Self { gamma_o: 1.0, gamma_aug: 0.0 }
    }

    pub fn traditional() -> Self {
        Self { gamma_o: 0.0, gamma_aug: 1.0 }
    }

    pub fn balanced() -> Self {
        Self { gamma_o: 0.5, gamma_aug: 0.5 }
    }

    pub fn gamma_o(&self) -> f64 {
        self.gamma_o
    }

    pub fn gamma_aug(&self) -> f64 {
        self.gamma_aug
    }
}

/// Weighted combination of the two loss terms.
pub fn mtv_loss(weights: &MixWeights, loss_o: f64, loss_aug: f64) -> f64 {
    weights.gamma_o * loss_o + weights.gamma_aug * loss_aug
}

/// SGD hyperparameters.
#[derive(Clone, Copy, Debug)]
pub struct TrainConfig {
    pub loss: LossKind,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub l2_lambda: f64,
    pub seed: u64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        if self.epochs < 1 {
            return Err(ClassifierError::InvalidConfig("epochs must be >= 1"));
        }
        if self.batch_size < 1 {
            return Err(ClassifierError::InvalidConfig("batch_size must be >= 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(ClassifierError::InvalidConfig("learning_rate must be > 0"));
        }
        if self.l2_lambda < 0.0 || self.l2_lambda.is_nan() {
            return Err(ClassifierError::InvalidConfig("l2_lambda must be >= 0"));
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            loss: LossKind::HingeOvr,
            epochs: 1000,
            batch_size: 32,
            learning_rate: 0.1,
            l2_lambda: 1e-4,
            seed: 0,
        }
    }
}

/// Per-step losses recorded by [`train_mtv_traced`].
#[derive(Clone, Copy, Debug)]
pub struct StepRecord {
    pub epoch: usize,
    pub step: usize,
    pub loss_original: f64,
    pub loss_augmented: f64,
    pub loss_combined: f64,
}

/// Sparse gradient accumulator: a dense scratch buffer plus a touched list,
/// reset in O(touched). Mirrors the dense gradient arithmetic exactly.
struct SparseAccum {
    dim: usize,
    values: Vec<f64>,
    stamped: Vec<bool>,
    touched: Vec<usize>,
    bias: Vec<f64>,
}

impl SparseAccum {
    fn new(classes: usize, dim: usize) -> Self {
        Self {
            dim,
            values: vec![0.0; classes * dim],
            stamped: vec![false; classes * dim],
            touched: Vec::new(),
            bias: vec![0.0; classes],
        }
    }

    fn reset(&mut self) {
        for &slot in &self.touched {
            self.values[slot] = 0.0;
            self.stamped[slot] = false;
        }
        self.touched.clear();
        self.bias.fill(0.0);
    }

    fn divide_by(&mut self, m: f64) {
        for &slot in &self.touched {
            self.values[slot] /= m;
        }
        for b in &mut self.bias {
            *b /= m;
        }
    }
}

impl GradSink for SparseAccum {
    fn add_weight(&mut self, class: usize, idx: u32, v: f64) {
        let slot = class * self.dim + idx as usize;
        if !self.stamped[slot] {
            self.stamped[slot] = true;
            self.touched.push(slot);
        }
        self.values[slot] += v;
    }

    fn add_bias(&mut self, class: usize, v: f64) {
        self.bias[class] += v;
    }
}

fn apply_decay(model: &mut LinearModel, learning_rate: f64, l2_lambda: f64) {
    let decay = 1.0 - learning_rate * l2_lambda;
    if decay != 1.0 {
        for w in model.weights_mut() {
            *w *= decay;
        }
    }
}

/// `w <- w * (1 - lr*l2) - lr * g`, touched slots only. Matches
/// [`LinearModel::sgd_step`] bit for bit on the same gradient.
fn apply_single(model: &mut LinearModel, acc: &SparseAccum, lr: f64, l2: f64) {
    apply_decay(model, lr, l2);
    for &slot in &acc.touched {
        model.weights_mut()[slot] -= lr * acc.values[slot];
    }
    for (b, g) in model.bias_mut().iter_mut().zip(&acc.bias) {
        *b -= lr * g;
    }
}

/// Combined update with gradient `g_o + gamma_aug * (g_a - g_o)`, which is
/// algebraically `gamma_o * g_o + gamma_aug * g_a` since the weights sum to
/// one. The difference form makes the update collapse to `g_o` exactly when
/// the augmented batch equals the original batch (identity augmentation).
fn apply_combined(
    model: &mut LinearModel,
    acc_o: &SparseAccum,
    acc_a: &SparseAccum,
    gamma_aug: f64,
    lr: f64,
    l2: f64,
) {
    apply_decay(model, lr, l2);
    let weights = model.weights_mut();
    for &slot in &acc_o.touched {
        let g = acc_o.values[slot] + gamma_aug * (acc_a.values[slot] - acc_o.values[slot]);
        weights[slot] -= lr * g;
    }
    for &slot in &acc_a.touched {
        if acc_o.stamped[slot] {
            continue;
        }
        let g = gamma_aug * acc_a.values[slot];
        weights[slot] -= lr * g;
    }
    for (c, b) in model.bias_mut().iter_mut().enumerate() {
        let g = acc_o.bias[c] + gamma_aug * (acc_a.bias[c] - acc_o.bias[c]);
        *b -= lr * g;
    }
}

fn train_impl(
    train: &Dataset,
    cfg: &TrainConfig,
    aug: &AugmentationConfig,
    lexicon: &SynonymLexicon,
    weights: MixWeights,
    dim: usize,
    mut on_step: impl FnMut(StepRecord),
) -> Result<LinearModel, ClassifierError> {
    cfg.validate()?;
    let classes = train.class_count();
    let features: Vec<_> = train
        .examples()
        .iter()
        .map(|ex| featurize(ex.sequence(), dim))
        .collect();
    let labels: Vec<usize> = train.examples().iter().map(|ex| ex.label()).collect();

    let mut model = LinearModel::zeros(classes, dim);
    let mut stream_order = RandomStream::seeded(mix64(cfg.seed, STREAM_ORDER));
    let mut stream_aug = RandomStream::seeded(mix64(cfg.seed, STREAM_AUGMENT));
    let use_aug = weights.gamma_aug > 0.0;

    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut acc_o = SparseAccum::new(classes, dim);
    let mut acc_a = SparseAccum::new(classes, dim);
    let mut scores = Vec::with_capacity(classes);

    for epoch in 0..cfg.epochs {
        stream_order.shuffle(&mut order);
        for (step, batch) in order.chunks(cfg.batch_size).enumerate() {
            let m = batch.len() as f64;
            acc_o.reset();
            let mut loss_o_sum = 0.0;
            for &i in batch {
                loss_o_sum +=
                    accumulate_example(&model, &features[i], labels[i], cfg.loss, &mut scores, &mut acc_o);
            }
            acc_o.divide_by(m);
            let loss_o = loss_o_sum / m;

            let loss_a = if use_aug {
                acc_a.reset();
                let mut loss_a_sum = 0.0;
                for &i in batch {
                    let seq = augment(train.examples()[i].sequence(), aug, lexicon, &mut stream_aug);
                    let x = featurize(&seq, dim);
                    loss_a_sum +=
                        accumulate_example(&model, &x, labels[i], cfg.loss, &mut scores, &mut acc_a);
                }
                acc_a.divide_by(m);
                loss_a_sum / m
            } else {
                0.0
            };

            if !use_aug {
                apply_single(&mut model, &acc_o, cfg.learning_rate, cfg.l2_lambda);
            } else if weights.gamma_o == 0.0 {
                apply_single(&mut model, &acc_a, cfg.learning_rate, cfg.l2_lambda);
            } else {
                apply_combined(
                    &mut model,
                    &acc_o,
                    &acc_a,
                    weights.gamma_aug,
                    cfg.learning_rate,
                    cfg.l2_lambda,
                );
            }

            on_step(StepRecord {
                epoch,
                step,
                loss_original: loss_o,
                loss_augmented: loss_a,
                loss_combined: mtv_loss(&weights, loss_o, loss_a),
            });
        }
    }
    Ok(model)
}

/// Trains a linear model under the weighted joint objective.
///
/// Each epoch shuffles the example order with the ordering stream, then for
/// every minibatch builds a fresh augmented copy of each member (skipped
/// entirely when `gamma_aug` is zero) and applies one SGD step with the
/// weighted combination of the two batch gradients.
pub fn train_mtv(
    train: &Dataset,
    cfg: &TrainConfig,
    aug: &AugmentationConfig,
    lexicon: &SynonymLexicon,
    weights: MixWeights,
    dim: usize,
) -> Result<LinearModel, ClassifierError> {
    train_impl(train, cfg, aug, lexicon, weights, dim, |_| {})
}

/// Like [`train_mtv`] but also returns the per-step loss log.
pub fn train_mtv_traced(
    train: &Dataset,
    cfg: &TrainConfig,
    aug: &AugmentationConfig,
    lexicon: &SynonymLexicon,
    weights: MixWeights,
    dim: usize,
) -> Result<(LinearModel, Vec<StepRecord>), ClassifierError> {
    let mut log = Vec::new();
    let model = train_impl(train, cfg, aug, lexicon, weights, dim, |rec| log.push(rec))?;
    Ok((model, log))
}

/// Epoch count that keeps the total number of updates equal to a baseline:
/// `max(1, round(baseline_epochs * baseline_size / corpus_size))`, rounded
/// half-up. Only meaningful when training on a pre-generated static corpus;
/// the online pairing above performs a constant update count per epoch by
/// construction.
pub fn equal_updates_epochs(
    baseline_epochs: usize,
    baseline_size: usize,
    corpus_size: usize,
) -> usize {
    assert!(baseline_epochs >= 1 && baseline_size >= 1 && corpus_size >= 1);
    let ratio = baseline_epochs as f64 * baseline_size as f64 / corpus_size as f64;
    let rounded = (ratio + 0.5).floor() as usize;
    rounded.max(1)
}
