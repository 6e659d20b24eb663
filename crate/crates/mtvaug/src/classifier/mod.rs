//! Feature extraction and linear classification under the weighted joint
//! objective.

mod features;
mod model;
mod train;

pub use features::{featurize, hash64, FeatureVector, FEATURE_HASH_SEED};
pub use model::{
    evaluate, loss_and_grad, ClassifierError, LinearModel, LossKind, ModelGradient, ModelIoError,
};
pub use train::{
    equal_updates_epochs, mtv_loss, train_mtv, train_mtv_traced, MixWeights, StepRecord,
    TrainConfig, STREAM_AUGMENT, STREAM_ORDER,
};
