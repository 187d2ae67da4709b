//! Supervised entropy discretization with the minimum-description-length
//! stopping rule (Fayyad and Irani).
//!
//! Each continuous feature is split recursively at the boundary point that
//! minimises the class entropy of the two halves. A split is kept only when
//! its information gain beats the MDL cost of encoding it. Intervals are
//! closed on the right: a value equal to a cut point falls in the lower
//! interval.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{Column, Dataset};
use crate::math::{entropy_of_counts, log2};
use crate::schema::FeatureKind;
use crate::{Error, Result};

/// Fitted cut points per continuous feature.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizationModel {
    n_features: usize,
    cuts: BTreeMap<usize, Vec<f64>>,
}

impl DiscretizationModel {
    /// Assembles a model from per-feature cut lists. Cuts must be strictly
    /// increasing.
    pub fn from_cuts(n_features: usize, cuts: BTreeMap<usize, Vec<f64>>) -> Result<Self> {
        for (&feature, list) in &cuts {
            if feature == 0 || feature > n_features {
                return Err(Error::UnknownFeature(feature));
            }
            if list.windows(2).any(|w| !(w[0] < w[1])) || list.iter().any(|c| !c.is_finite()) {
                return Err(Error::Parameter(format!(
                    "cut points for feature {feature} are not strictly increasing"
                )));
            }
        }
        Ok(Self { n_features, cuts })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Cut points of a continuous feature; `None` for nominal features.
    pub fn cuts(&self, feature: usize) -> Option<&[f64]> {
        self.cuts.get(&feature).map(Vec::as_slice)
    }

    /// `(feature, cuts)` pairs in feature order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.cuts.iter().map(|(&f, c)| (f, c.as_slice()))
    }

    pub fn interval(&self, feature: usize, value: f64) -> Option<u32> {
        self.cuts(feature).map(|c| interval_of(c, value))
    }
}

/// Interval index of `value`: the number of cuts strictly below it.
pub fn interval_of(cuts: &[f64], value: f64) -> u32 {
    cuts.partition_point(|&c| c < value) as u32
}

/// Fits cut points for every continuous feature of a binarized dataset.
pub fn fit_mdl_discretizer(d: &Dataset) -> Result<DiscretizationModel> {
    d.ensure_binarized()?;
    let mut cuts = BTreeMap::new();
    for spec in d.schema().features() {
        if spec.kind != FeatureKind::Continuous {
            continue;
        }
        let values = numeric_values(d.column(spec.index)?)
            .ok_or_else(|| Error::Schema(format!("feature `{}` is not numeric", spec.name)))?;
        cuts.insert(spec.index, mdl_cut_points(&values, d.labels(), d.n_classes()));
    }
    DiscretizationModel::from_cuts(d.schema().len(), cuts)
}

/// Numeric view of a continuous column (raw values or interval codes).
pub fn numeric_values(col: &Column) -> Option<Vec<f64>> {
    match col {
        Column::Numeric(v) => Some(v.clone()),
        Column::Binned { codes, .. } => Some(codes.iter().map(|&c| c as f64).collect()),
        Column::Nominal { .. } => None,
    }
}

/// MDL cut points for one column, ascending.
pub fn mdl_cut_points(values: &[f64], classes: &[u32], n_classes: usize) -> Vec<f64> {
    debug_assert_eq!(values.len(), classes.len());
    let mut sorted: Vec<(f64, u32)> = values.iter().copied().zip(classes.iter().copied()).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut cuts = Vec::new();
    let mut pending = vec![(0usize, sorted.len())];
    while let Some((lo, hi)) = pending.pop() {
        if let Some(split) = best_accepted_split(&sorted[lo..hi], n_classes) {
            let at = lo + split;
            cuts.push(cut_value(sorted[at - 1].0, sorted[at].0));
            pending.push((lo, at));
            pending.push((at, hi));
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts
}

/// Midpoint of two distinct values, kept strictly below the upper one so
/// the upper value lands on the right of the cut.
fn cut_value(lower: f64, upper: f64) -> f64 {
    let mid = lower + (upper - lower) / 2.0;
    if mid < upper {
        mid
    } else {
        lower
    }
}

fn class_counts(rows: &[(f64, u32)], n_classes: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n_classes];
    for &(_, c) in rows {
        counts[c as usize] += 1;
    }
    counts
}

/// Position `i` of the entropy-minimising boundary cut (left = `..i`) if
/// it passes the MDL test.
fn best_accepted_split(rows: &[(f64, u32)], n_classes: usize) -> Option<usize> {
    let n = rows.len();
    if n < 2 {
        return None;
    }
    let total = class_counts(rows, n_classes);
    let parent_entropy = entropy_of_counts(&total);
    if parent_entropy == 0.0 {
        return None;
    }

    // Runs of equal values with their class if pure.
    let mut groups: Vec<(usize, usize, Option<u32>)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || rows[i].0 != rows[start].0 {
            let first = rows[start].1;
            let pure = rows[start..i].iter().all(|r| r.1 == first).then_some(first);
            groups.push((start, i, pure));
            start = i;
        }
    }
    if groups.len() < 2 {
        return None;
    }

    let nf = n as f64;
    let mut left = vec![0u64; n_classes];
    let mut right = total.clone();
    let mut best: Option<(usize, f64)> = None;
    for pair in groups.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        for r in &rows[a.0..a.1] {
            left[r.1 as usize] += 1;
            right[r.1 as usize] -= 1;
        }
        let boundary = !matches!((a.2, b.2), (Some(x), Some(y)) if x == y);
        if !boundary {
            continue;
        }
        let nl = a.1 as f64;
        let weighted = nl / nf * entropy_of_counts(&left) + (nf - nl) / nf * entropy_of_counts(&right);
        if best.is_none_or(|(_, e)| weighted < e) {
            best = Some((a.1, weighted));
        }
    }
    let (at, weighted) = best?;

    let left = class_counts(&rows[..at], n_classes);
    let right = class_counts(&rows[at..], n_classes);
    let gain = parent_entropy - weighted;
    if mdl_accepts(gain, &total, &left, &right) {
        Some(at)
    } else {
        None
    }
}

/// The Fayyad-Irani acceptance test:
/// `gain > (log2(n - 1) + delta) / n` with
/// `delta = log2(3^k - 2) - (k E(S) - k1 E(S1) - k2 E(S2))`.
pub fn mdl_accepts(gain: f64, parent: &[u64], left: &[u64], right: &[u64]) -> bool {
    let n: u64 = parent.iter().sum();
    if n < 2 {
        return false;
    }
    let present = |c: &[u64]| c.iter().filter(|&&x| x > 0).count() as f64;
    let (k, k1, k2) = (present(parent), present(left), present(right));
    let delta = log2(libm::pow(3.0, k) - 2.0)
        - (k * entropy_of_counts(parent) - k1 * entropy_of_counts(left) - k2 * entropy_of_counts(right));
    let n = n as f64;
    gain > (log2(n - 1.0) + delta) / n
}

/// Replaces continuous columns by interval indices. Nominal columns and
/// labels are untouched.
pub fn apply_discretizer(m: &DiscretizationModel, d: &Dataset) -> Result<Dataset> {
    if m.n_features != d.schema().len() {
        return Err(Error::Schema(format!(
            "model fitted on {} features, dataset has {}",
            m.n_features,
            d.schema().len()
        )));
    }
    let mut columns = Vec::with_capacity(d.columns().len());
    for (spec, col) in d.schema().features().iter().zip(d.columns()) {
        let mapped = match (spec.kind, m.cuts(spec.index)) {
            (FeatureKind::Continuous, Some(cuts)) => {
                let values = numeric_values(col)
                    .ok_or_else(|| Error::Schema(format!("feature `{}` is not numeric", spec.name)))?;
                Column::Binned {
                    codes: values.iter().map(|&v| interval_of(cuts, v)).collect(),
                    bins: cuts.len() as u32 + 1,
                }
            }
            (FeatureKind::Nominal, None) => col.clone(),
            _ => {
                return Err(Error::Schema(format!(
                    "feature `{}` does not match the discretization model",
                    spec.name
                )))
            }
        };
        columns.push(mapped);
    }
    d.with_columns(columns)
}
