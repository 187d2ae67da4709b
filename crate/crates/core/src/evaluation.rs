//! Detection metrics and the cross-validation driver. The positive class
//! is `anomaly`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::classifier::{train_tree_on, TreeModel, TreeParams};
use crate::dataset::{stratified_kfold, Dataset, FoldAssignment};
use crate::{Error, Result, ANOMALY, NORMAL};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[cfg_attr(feature = "serde", serde(rename = "fn"))]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn actual_attacks(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn actual_normal(&self) -> u64 {
        self.tn + self.fp
    }

    pub fn merge(&self, other: &ConfusionMatrix) -> ConfusionMatrix {
        ConfusionMatrix {
            tp: self.tp + other.tp,
            tn: self.tn + other.tn,
            fp: self.fp + other.fp,
            fn_: self.fn_ + other.fn_,
        }
    }

    fn record(&mut self, predicted: u32, actual: u32) {
        match (actual == ANOMALY, predicted == ANOMALY) {
            (true, true) => self.tp += 1,
            (true, false) => self.fn_ += 1,
            (false, true) => self.fp += 1,
            (false, false) => self.tn += 1,
        }
    }
}

/// Tallies predictions against ground truth (class codes, anomaly
/// positive).
pub fn confusion(predicted: &[u32], actual: &[u32]) -> Result<ConfusionMatrix> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: actual.len(),
        });
    }
    let mut m = ConfusionMatrix::default();
    for (&p, &a) in predicted.iter().zip(actual) {
        debug_assert!(p == NORMAL || p == ANOMALY);
        m.record(p, a);
    }
    Ok(m)
}

/// A percentage, or the reason it cannot be computed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Metric {
    Defined(f64),
    Undefined(String),
}

impl Metric {
    fn ratio(num: u64, den: u64, reason: &str) -> Metric {
        if den == 0 {
            Metric::Undefined(reason.to_string())
        } else {
            Metric::Defined(num as f64 / den as f64 * 100.0)
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Metric::Defined(v) => Some(*v),
            Metric::Undefined(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsReport {
    pub method: String,
    pub feature_count: usize,
    pub accuracy: Metric,
    pub detection_rate: Metric,
    pub false_alarm_rate: Metric,
    pub build_time_secs: f64,
    pub matrix: ConfusionMatrix,
}

/// Accuracy `(TP+TN)/total`, detection rate `TP/(TP+FN)` and false alarm
/// rate `FP/(FP+TN)`, all in percent.
pub fn metrics(m: &ConfusionMatrix, build_time_secs: f64, method: &str, feature_count: usize) -> MetricsReport {
    MetricsReport {
        method: method.to_string(),
        feature_count,
        accuracy: Metric::ratio(m.tp + m.tn, m.total(), "no instances evaluated"),
        detection_rate: Metric::ratio(m.tp, m.tp + m.fn_, "no actual attacks"),
        false_alarm_rate: Metric::ratio(m.fp, m.fp + m.tn, "no actual normal instances"),
        build_time_secs,
        matrix: *m,
    }
}

/// Monotonic time source in seconds, supplied by the caller.
pub trait Clock {
    fn now_secs(&self) -> f64;
}

/// A clock that always reads zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_secs(&self) -> f64 {
        0.0
    }
}

impl<F: Fn() -> f64> Clock for F {
    fn now_secs(&self) -> f64 {
        self()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    pub matrix: ConfusionMatrix,
    pub train_secs: f64,
    pub tree: TreeModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub folds: Vec<FoldResult>,
    pub pooled: ConfusionMatrix,
    /// Pooled metrics; build time is the mean per-fold training time.
    pub report: MetricsReport,
}

/// Trains on every fold but `fold` and evaluates on `fold`.
pub fn run_fold<C: Clock + ?Sized>(
    d: &Dataset,
    assignment: &FoldAssignment,
    fold: usize,
    features: &[usize],
    params: &TreeParams,
    clock: &C,
) -> Result<FoldResult> {
    let (train, test) = assignment.split(fold);
    let start = clock.now_secs();
    let tree = train_tree_on(d, &train, features, params)?;
    let train_secs = clock.now_secs() - start;
    let predicted = tree.predict_rows(d, &test);
    let actual: Vec<u32> = test.iter().map(|&r| d.labels()[r]).collect();
    Ok(FoldResult {
        fold,
        matrix: confusion(&predicted, &actual)?,
        train_secs,
        tree,
    })
}

/// Pools per-fold matrices (micro-average) into one report.
pub fn pool(folds: Vec<FoldResult>, method: &str, feature_count: usize) -> CrossValidation {
    let pooled = folds
        .iter()
        .fold(ConfusionMatrix::default(), |acc, f| acc.merge(&f.matrix));
    let mean_time = if folds.is_empty() {
        0.0
    } else {
        folds.iter().map(|f| f.train_secs).sum::<f64>() / folds.len() as f64
    };
    CrossValidation {
        report: metrics(&pooled, mean_time, method, feature_count),
        pooled,
        folds,
    }
}

/// Stratified k-fold cross-validation of a decision tree restricted to
/// `features`.
pub fn cross_validate<C: Clock + ?Sized>(
    d: &Dataset,
    features: &[usize],
    k: usize,
    seed: u64,
    params: &TreeParams,
    method: &str,
    clock: &C,
) -> Result<CrossValidation> {
    d.ensure_binarized()?;
    if features.is_empty() {
        return Err(Error::EmptyFeatureSet);
    }
    let assignment = stratified_kfold(d, k, seed)?;
    let folds = (0..k)
        .map(|fold| run_fold(d, &assignment, fold, features, params, clock))
        .collect::<Result<Vec<_>>>()?;
    Ok(pool(folds, method, features.len()))
}
