//! Evaluation reports: a JSON document per run and one CSV row per
//! compared feature set.

use std::io::Write;

use emffs_core::evaluation::{CrossValidation, Metric};
use emffs_core::{ConfusionMatrix, MetricsReport};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::FormatResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub matrix: ConfusionMatrix,
    pub train_secs: f64,
    pub tree_nodes: usize,
    pub tree_leaves: usize,
    pub tree_depth: usize,
}

/// Seconds spent in each stage that ran.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub load_secs: Option<f64>,
    pub discretize_secs: Option<f64>,
    /// Per ranking method, in run order.
    pub rank_secs: Vec<(String, f64)>,
    pub select_secs: Option<f64>,
    /// Whole cross-validation, including prediction.
    pub evaluate_secs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub config: RunConfig,
    pub method: String,
    pub features: Vec<usize>,
    pub folds: Vec<FoldReport>,
    pub pooled: MetricsReport,
    pub timings: Timings,
}

impl EvaluationReport {
    pub fn new(config: &RunConfig, features: &[usize], cv: &CrossValidation, timings: Timings) -> Self {
        Self {
            config: config.clone(),
            method: cv.report.method.clone(),
            features: features.to_vec(),
            folds: cv
                .folds
                .iter()
                .map(|f| FoldReport {
                    fold: f.fold,
                    matrix: f.matrix,
                    train_secs: f.train_secs,
                    tree_nodes: f.tree.node_count(),
                    tree_leaves: f.tree.leaf_count(),
                    tree_depth: f.tree.depth(),
                })
                .collect(),
            pooled: cv.report.clone(),
            timings,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub const SUMMARY_HEADER: [&str; 6] = [
    "method",
    "features",
    "accuracy",
    "detection_rate",
    "false_alarm_rate",
    "build_time_secs",
];

fn metric_cell(m: &Metric) -> String {
    match m {
        Metric::Defined(v) => format!("{v:.4}"),
        Metric::Undefined(_) => "undefined".into(),
    }
}

/// Writes the header and one row per report. Percentages carry four
/// decimals; undefined metrics read `undefined`.
pub fn write_summary_csv<W: Write>(reports: &[MetricsReport], writer: W) -> FormatResult<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SUMMARY_HEADER)?;
    for r in reports {
        w.write_record([
            r.method.clone(),
            r.feature_count.to_string(),
            metric_cell(&r.accuracy),
            metric_cell(&r.detection_rate),
            metric_cell(&r.false_alarm_rate),
            format!("{:.6}", r.build_time_secs),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-fold matrices and the pooled total. Holds no timing, so reruns
/// produce identical bytes.
pub fn write_confusion_csv<W: Write>(cv: &CrossValidation, writer: W) -> FormatResult<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["fold", "tp", "tn", "fp", "fn"])?;
    let rows = cv
        .folds
        .iter()
        .map(|f| (f.fold.to_string(), f.matrix))
        .chain(std::iter::once(("pooled".to_string(), cv.pooled)));
    for (label, m) in rows {
        w.write_record([label, m.tp.to_string(), m.tn.to_string(), m.fp.to_string(), m.fn_.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
