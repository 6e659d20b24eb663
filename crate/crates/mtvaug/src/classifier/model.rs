//! Linear classifier: scoring, losses, gradients, evaluation, and model IO.

use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::classifier::features::{featurize, FeatureVector};
use crate::text::Dataset;

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("feature dimension {got} does not match model dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gamma_o must be in [0, 1], got {0}")]
    InvalidGamma(f64),
    #[error("invalid training config: {0}")]
    InvalidConfig(&'static str),
}

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad magic header")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
}

/// Loss used for training.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LossKind {
    /// Mean softmax cross-entropy.
    Logistic,
    /// Mean one-vs-rest hinge, averaged over classes.
    HingeOvr,
}

impl FromStr for LossKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "logistic" => Ok(LossKind::Logistic),
            "hinge" => Ok(LossKind::HingeOvr),
            other => Err(format!("unknown loss {other:?} (expected logistic|hinge)")),
        }
    }
}

const MODEL_MAGIC: &[u8; 8] = b"MTVLINMD";
const MODEL_VERSION: u8 = 1;

/// A `classes x dim` weight matrix with per-class bias.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    classes: usize,
    dim: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(classes: usize, dim: usize) -> Self {
        Self {
            classes,
            dim,
            weights: vec![0.0; classes * dim],
            bias: vec![0.0; classes],
        }
    }

    /// Builds a model from raw parameters. `weights` is row-major
    /// `classes x dim`; all entries must be finite.
    pub fn from_parts(
        classes: usize,
        dim: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self, ClassifierError> {
        if weights.len() != classes * dim || bias.len() != classes {
            return Err(ClassifierError::InvalidConfig(
                "parameter lengths do not match classes x dim",
            ));
        }
        if weights.iter().chain(bias.iter()).any(|v| !v.is_finite()) {
            return Err(ClassifierError::InvalidConfig(
                "model parameters must be finite",
            ));
        }
        Ok(Self {
            classes,
            dim,
            weights,
            bias,
        })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub(crate) fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub(crate) fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    /// Per-class scores `W x + b`, appended into `out`.
    pub fn scores_into(&self, x: &FeatureVector, out: &mut Vec<f64>) {
        out.clear();
        for c in 0..self.classes {
            let row = &self.weights[c * self.dim..(c + 1) * self.dim];
            let mut s = 0.0;
            for &(idx, v) in x.entries() {
                s += row[idx as usize] * v;
            }
            out.push(s + self.bias[c]);
        }
    }

    pub fn scores(&self, x: &FeatureVector) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.classes);
        self.scores_into(x, &mut out);
        out
    }

    /// Argmax class, ties broken by the lowest class id.
    pub fn predict(&self, x: &FeatureVector) -> usize {
        let scores = self.scores(x);
        let mut best = 0;
        for (c, &s) in scores.iter().enumerate().skip(1) {
            if s > scores[best] {
                best = c;
            }
        }
        best
    }

    /// One SGD step: `w <- w * (1 - lr * l2)` followed by `w <- w - lr * g`.
    /// L2 decay applies to the weight matrix only; the bias is unregularized.
    pub fn sgd_step(&mut self, grad: &ModelGradient, learning_rate: f64, l2_lambda: f64) {
        debug_assert_eq!(grad.classes, self.classes);
        debug_assert_eq!(grad.dim, self.dim);
        let decay = 1.0 - learning_rate * l2_lambda;
        if decay != 1.0 {
            for w in &mut self.weights {
                *w *= decay;
            }
        }
        for (w, g) in self.weights.iter_mut().zip(&grad.weights) {
            *w -= learning_rate * g;
        }
        for (b, g) in self.bias.iter_mut().zip(&grad.bias) {
            *b -= learning_rate * g;
        }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), ModelIoError> {
        w.write_all(MODEL_MAGIC)?;
        w.write_all(&[MODEL_VERSION])?;
        w.write_all(&(self.classes as u32).to_le_bytes())?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        for b in &self.bias {
            w.write_all(&b.to_le_bytes())?;
        }
        for wt in &self.weights {
            w.write_all(&wt.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, ModelIoError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MODEL_MAGIC {
            return Err(ModelIoError::BadMagic);
        }
        let mut version = [0u8; 1];
        r.read_exact(&mut version)?;
        if version[0] != MODEL_VERSION {
            return Err(ModelIoError::UnsupportedVersion(version[0]));
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)?;
        let classes = u32::from_le_bytes(u32buf) as usize;
        r.read_exact(&mut u32buf)?;
        let dim = u32::from_le_bytes(u32buf) as usize;
        let mut f64buf = [0u8; 8];
        let mut bias = Vec::with_capacity(classes);
        for _ in 0..classes {
            r.read_exact(&mut f64buf)?;
            bias.push(f64::from_le_bytes(f64buf));
        }
        let mut weights = Vec::with_capacity(classes * dim);
        for _ in 0..classes * dim {
            r.read_exact(&mut f64buf)?;
            weights.push(f64::from_le_bytes(f64buf));
        }
        Ok(Self {
            classes,
            dim,
            weights,
            bias,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelIoError> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelIoError> {
        let bytes = std::fs::read(path)?;
        Self::read_from(bytes.as_slice())
    }

    /// Exact bit-level equality of all parameters.
    pub fn bits_eq(&self, other: &Self) -> bool {
        self.classes == other.classes
            && self.dim == other.dim
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| a.to_bits() == b.to_bits())
            && self
                .bias
                .iter()
                .zip(&other.bias)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Dense gradient with the same shape as the model.
#[derive(Clone, Debug)]
pub struct ModelGradient {
    classes: usize,
    dim: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl ModelGradient {
    pub fn zeros(classes: usize, dim: usize) -> Self {
        Self {
            classes,
            dim,
            weights: vec![0.0; classes * dim],
            bias: vec![0.0; classes],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }
}

/// Accumulation target for per-example gradient contributions. Both the
/// dense gradient and the sparse training accumulator implement this with
/// identical arithmetic, so the two paths produce bit-identical values.
pub(crate) trait GradSink {
    fn add_weight(&mut self, class: usize, idx: u32, v: f64);
    fn add_bias(&mut self, class: usize, v: f64);
}

impl GradSink for ModelGradient {
    fn add_weight(&mut self, class: usize, idx: u32, v: f64) {
        self.weights[class * self.dim + idx as usize] += v;
    }

    fn add_bias(&mut self, class: usize, v: f64) {
        self.bias[class] += v;
    }
}

/// Adds one example's unscaled gradient into the sink and returns its loss.
///
/// Logistic: softmax cross-entropy, coefficient `p_c - [c == y]`.
/// HingeOvr: `(1/C) * sum_c max(0, 1 - y_c s_c)` with `y_c = +-1`;
/// coefficient `-y_c / C` where the margin is active, zero at the kink.
pub(crate) fn accumulate_example<S: GradSink>(
    model: &LinearModel,
    x: &FeatureVector,
    label: usize,
    kind: LossKind,
    scores: &mut Vec<f64>,
    sink: &mut S,
) -> f64 {
    debug_assert!(label < model.classes);
    model.scores_into(x, scores);
    let classes = model.classes;
    match kind {
        LossKind::Logistic => {
            let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let sum_exp: f64 = scores.iter().map(|s| (s - max).exp()).sum();
            let log_sum = max + sum_exp.ln();
            for c in 0..classes {
                let p = (scores[c] - log_sum).exp();
                let coeff = if c == label { p - 1.0 } else { p };
                for &(idx, v) in x.entries() {
                    sink.add_weight(c, idx, coeff * v);
                }
                sink.add_bias(c, coeff);
            }
            log_sum - scores[label]
        }
        LossKind::HingeOvr => {
            let inv_c = 1.0 / classes as f64;
            let mut loss = 0.0;
            for c in 0..classes {
                let sign = if c == label { 1.0 } else { -1.0 };
                let margin = 1.0 - sign * scores[c];
                if margin > 0.0 {
                    loss += margin * inv_c;
                    let coeff = -sign * inv_c;
                    for &(idx, v) in x.entries() {
                        sink.add_weight(c, idx, coeff * v);
                    }
                    sink.add_bias(c, coeff);
                }
            }
            loss
        }
    }
}

/// Mean loss and mean gradient over a batch. The gradient excludes the L2
/// term, which is applied by [`LinearModel::sgd_step`].
pub fn loss_and_grad(
    model: &LinearModel,
    batch: &[(FeatureVector, usize)],
    kind: LossKind,
) -> Result<(f64, ModelGradient), ClassifierError> {
    assert!(!batch.is_empty(), "batch must be non-empty");
    for (x, _) in batch {
        if x.dim() != model.dim {
            return Err(ClassifierError::DimensionMismatch {
                expected: model.dim,
                got: x.dim(),
            });
        }
    }
    let mut grad = ModelGradient::zeros(model.classes, model.dim);
    let mut scores = Vec::with_capacity(model.classes);
    let mut loss_sum = 0.0;
    for (x, label) in batch {
        loss_sum += accumulate_example(model, x, *label, kind, &mut scores, &mut grad);
    }
    let m = batch.len() as f64;
    for w in &mut grad.weights {
        *w /= m;
    }
    for b in &mut grad.bias {
        *b /= m;
    }
    Ok((loss_sum / m, grad))
}

/// Fraction of test examples whose argmax score matches the label, ties
/// broken by the lowest class id.
pub fn evaluate(model: &LinearModel, test: &Dataset, dim: usize) -> f64 {
    assert_eq!(dim, model.dim, "evaluation dimension must match the model");
    let correct = test
        .examples()
        .iter()
        .filter(|ex| model.predict(&featurize(ex.sequence(), dim)) == ex.label())
        .count();
    correct as f64 / test.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{tokenize, LabeledExample};

    fn fv(text: &str, dim: usize) -> FeatureVector {
        featurize(&tokenize(text).unwrap(), dim)
    }

    #[test]
    fn zero_model_logistic_loss_is_ln2() {
        let model = LinearModel::zeros(2, 16);
        let batch = vec![(fv("some words", 16), 1)];
        let (loss, _) = loss_and_grad(&model, &batch, LossKind::Logistic).unwrap();
        assert!((loss - (2.0f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_model_hinge_loss_is_one() {
        for classes in [2, 3, 6] {
            let model = LinearModel::zeros(classes, 16);
            let batch = vec![(fv("some words", 16), 0)];
            let (loss, _) = loss_and_grad(&model, &batch, LossKind::HingeOvr).unwrap();
            assert!((loss - 1.0).abs() < 1e-12, "classes={classes} loss={loss}");
        }
    }

    #[test]
    fn dimension_mismatch_detected() {
        let model = LinearModel::zeros(2, 16);
        let batch = vec![(fv("words", 32), 0)];
        assert!(matches!(
            loss_and_grad(&model, &batch, LossKind::Logistic),
            Err(ClassifierError::DimensionMismatch { expected: 16, got: 32 })
        ));
    }

    #[test]
    fn predict_breaks_ties_toward_lowest_class() {
        let model = LinearModel::zeros(3, 16);
        assert_eq!(model.predict(&fv("anything", 16)), 0);
    }

    #[test]
    fn evaluate_zero_model_counts_label_zero() {
        let examples = vec![
            LabeledExample::new(tokenize("a b").unwrap(), 0),
            LabeledExample::new(tokenize("c d").unwrap(), 1),
            LabeledExample::new(tokenize("e f").unwrap(), 1),
            LabeledExample::new(tokenize("g h").unwrap(), 0),
        ];
        let ds = Dataset::new(examples, vec!["x".into(), "y".into()]).unwrap();
        let model = LinearModel::zeros(2, 16);
        assert!((evaluate(&model, &ds, 16) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn evaluate_matches_per_example_argmax_oracle() {
        // Random-ish model filled from a deterministic stream.
        let mut stream = crate::rng::RandomStream::seeded(13);
        let dim = 32;
        let mut model = LinearModel::zeros(3, dim);
        for w in model.weights_mut() {
            *w = (stream.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        }
        for b in model.bias_mut() {
            *b = (stream.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        }
        let texts = ["alpha beta", "gamma delta", "epsilon zeta", "eta theta", "iota kappa"];
        let examples: Vec<LabeledExample> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| LabeledExample::new(tokenize(t).unwrap(), i % 3))
            .collect();
        let ds = Dataset::new(examples, vec!["a".into(), "b".into(), "c".into()]).unwrap();

        let mut correct = 0usize;
        for ex in ds.examples() {
            let x = featurize(ex.sequence(), dim);
            // Recompute scores manually.
            let mut best = 0;
            let mut best_score = f64::NEG_INFINITY;
            for c in 0..3 {
                let mut s = model.bias()[c];
                for &(idx, v) in x.entries() {
                    s += model.weights()[c * dim + idx as usize] * v;
                }
                if s > best_score {
                    best_score = s;
                    best = c;
                }
            }
            if best == ex.label() {
                correct += 1;
            }
        }
        let expected = correct as f64 / ds.len() as f64;
        assert_eq!(evaluate(&model, &ds, dim), expected);
    }

    #[test]
    fn model_io_roundtrip_is_exact() {
        let mut stream = crate::rng::RandomStream::seeded(21);
        let mut model = LinearModel::zeros(3, 8);
        for w in model.weights_mut() {
            *w = f64::from_bits(stream.next_u64() >> 2);
        }
        for b in model.bias_mut() {
            *b = f64::from_bits(stream.next_u64() >> 2);
        }
        let mut buf = Vec::new();
        model.write_to(&mut buf).unwrap();
        let loaded = LinearModel::read_from(buf.as_slice()).unwrap();
        assert!(model.bits_eq(&loaded));
    }

    #[test]
    fn model_io_rejects_bad_magic_and_version() {
        let model = LinearModel::zeros(2, 4);
        let mut buf = Vec::new();
        model.write_to(&mut buf).unwrap();

        let mut bad_magic = buf.clone();
        bad_magic[0] = b'X';
        assert!(matches!(
            LinearModel::read_from(bad_magic.as_slice()),
            Err(ModelIoError::BadMagic)
        ));

        let mut bad_version = buf.clone();
        bad_version[8] = 99;
        assert!(matches!(
            LinearModel::read_from(bad_version.as_slice()),
            Err(ModelIoError::UnsupportedVersion(99))
        ));

        buf.truncate(buf.len() - 3);
        assert!(matches!(
            LinearModel::read_from(buf.as_slice()),
            Err(ModelIoError::Io(_))
        ));
    }

    #[test]
    fn sgd_step_applies_decay_then_gradient() {
        let mut model = LinearModel::zeros(1, 2);
        model.weights_mut()[0] = 1.0;
        model.bias_mut()[0] = 0.5;
        let mut grad = ModelGradient::zeros(1, 2);
        grad.weights[0] = 0.25;
        grad.bias[0] = 0.1;
        model.sgd_step(&grad, 0.1, 0.01);
        let decay = 1.0 - 0.1 * 0.01;
        assert_eq!(model.weights()[0], 1.0 * decay - 0.1 * 0.25);
        assert_eq!(model.weights()[1], 0.0);
        // Bias is not decayed.
        assert_eq!(model.bias()[0], 0.5 - 0.1 * 0.1);
    }
}
