//! Ensemble multi-filter feature selection (EMFFS) for intrusion-detection
//! data, with the supporting pieces needed to run it end to end:
//!
//! * [`dataset`]: columnar instances, label binarization, stratified
//!   subsampling and k-fold assignment.
//! * [`discretizer`]: supervised MDL entropy discretization of continuous
//!   columns.
//! * [`filters`]: information gain, gain ratio, chi-squared and ReliefF
//!   scorers, plus deterministic ranking.
//! * [`ensemble`]: top-fraction split of each ranking, occurrence counting
//!   and threshold voting.
//! * [`classifier`]: C4.5-style decision tree induction, error-based
//!   pruning and prediction.
//! * [`evaluation`]: confusion matrices, detection metrics and the
//!   cross-validation driver.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, timing and
//! parallel execution are provided by the `emffs` companion crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(a < b)` is used on purpose: NaN must fail ordering checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod classifier;
pub mod dataset;
pub mod discretizer;
pub mod ensemble;
mod error;
pub mod evaluation;
pub mod filters;
mod math;
pub mod schema;

pub use classifier::{prune_tree, train_tree, train_tree_on, SplitCriterion, TreeModel, TreeParams};
pub use dataset::{stratified_kfold, stratified_sample, Column, Dataset, FoldAssignment};
pub use discretizer::{apply_discretizer, fit_mdl_discretizer, DiscretizationModel};
pub use ensemble::{combine_counts, ensemble_select, top_fraction, EnsembleConfig, FeatureSubset, SelectedFeatureSet};
pub use error::{Error, Result};
pub use evaluation::{confusion, cross_validate, metrics, ConfusionMatrix, MetricsReport};
pub use filters::{rank_features, FilterMethod, RankedFeatureList};
pub use schema::{FeatureKind, FeatureSpec, Schema};

/// Class code of the `normal` label in a binarized dataset.
pub const NORMAL: u32 = 0;
/// Class code of the `anomaly` label in a binarized dataset.
pub const ANOMALY: u32 = 1;
