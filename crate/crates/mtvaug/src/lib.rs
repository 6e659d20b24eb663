//! Token-level text augmentation with a weighted multi-task training
//! objective.
//!
//! Training can blend two loss terms: the loss on original examples and the
//! loss on augmented copies generated online, weighted by `gamma_o` and
//! `gamma_aug = 1 - gamma_o`. Setting `gamma_o = 1` recovers vanilla
//! training; `gamma_o = 0` recovers augmentation-only training; intermediate
//! weights treat augmented data as an auxiliary task, which tolerates much
//! stronger augmentation.
//!
//! The crate provides:
//!
//! - [`text`]: tokenization, labeled datasets, synonym lexicons;
//! - [`augment`]: four operators (synonym substitution, word dropout, synonym
//!   injection, positional shuffling) with a strength parameter `alpha` that
//!   scales the perturbation count with sequence length;
//! - [`classifier`]: hashed n-gram features and a linear model trained by
//!   SGD under the weighted joint objective, with deterministic seeding;
//! - [`experiment`]: multi-seed runs, strength x weight sweep grids, boost
//!   aggregation, and machine-readable reports (CSV + JSON), plus a
//!   synthetic corpus generator for self-contained experiments;
//! - [`rng`]: the deterministic stream primitives everything draws from.

pub mod augment;
pub mod classifier;
pub mod experiment;
pub mod rng;
pub mod text;
