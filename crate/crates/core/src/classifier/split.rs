//! Split evaluation for tree induction.

use alloc::borrow::Cow;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{Column, Dataset};
use crate::math::entropy_of_counts;
use crate::{Error, Result};

use super::{SplitCriterion, Test, TreeParams};

/// Gains at or below this are treated as zero.
pub const MIN_GAIN: f64 = 1e-12;

/// Weighted average of child label entropies, `sum |K_i|/|K| Info(K_i)`.
pub fn partition_info<P: AsRef<[u64]>>(partitions: &[P]) -> f64 {
    let total: u64 = partitions.iter().map(|p| p.as_ref().iter().sum::<u64>()).sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    partitions
        .iter()
        .map(|counts| {
            let counts = counts.as_ref();
            let n: u64 = counts.iter().sum();
            n as f64 / total * entropy_of_counts(counts)
        })
        .sum()
}

/// `Info(K) - Info(X, K)`.
pub fn split_gain<P: AsRef<[u64]>>(parent: &[u64], partitions: &[P]) -> f64 {
    entropy_of_counts(parent) - partition_info(partitions)
}

/// Entropy of the partition sizes (gain-ratio denominator).
pub fn split_info<P: AsRef<[u64]>>(partitions: &[P]) -> f64 {
    let sizes: Vec<u64> = partitions.iter().map(|c| c.as_ref().iter().sum()).collect();
    entropy_of_counts(&sizes)
}

/// A chosen split of a node.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub test: Test,
    /// Rows of each child, in child order.
    pub partitions: Vec<Vec<usize>>,
    pub gain: f64,
    pub split_info: f64,
}

pub(crate) enum FeatureData<'a> {
    Continuous(Cow<'a, [f64]>),
    Nominal { codes: &'a [u32], values: &'a [String] },
}

impl<'a> FeatureData<'a> {
    pub(crate) fn of(col: &'a Column) -> Self {
        match col {
            Column::Numeric(v) => FeatureData::Continuous(Cow::Borrowed(v)),
            Column::Binned { codes, .. } => {
                FeatureData::Continuous(Cow::Owned(codes.iter().map(|&c| c as f64).collect()))
            }
            Column::Nominal { codes, values } => FeatureData::Nominal { codes, values },
        }
    }
}

/// Best cut of one feature, before criterion-level comparison.
#[derive(Debug, Clone)]
pub(crate) struct Scored {
    pub test: Test,
    pub gain: f64,
    pub split_info: f64,
    /// Continuous: position in the sorted row list where the right child
    /// starts. Nominal: code -> child index.
    pub layout: Layout,
}

#[derive(Debug, Clone)]
pub(crate) enum Layout {
    Cut(usize),
    Codes(Vec<Option<usize>>),
}

fn threshold_between(lower: f64, upper: f64) -> f64 {
    let mid = lower + (upper - lower) / 2.0;
    if mid < upper {
        mid
    } else {
        lower
    }
}

/// Scans a value-sorted row list for the highest-gain binary cut with both
/// sides holding at least `min_leaf` rows. Ties keep the lower threshold.
pub(crate) fn scan_continuous(
    sorted: &[u32],
    values: &[f64],
    classes: &[u32],
    parent: &[u64],
    min_leaf: usize,
) -> Option<Scored> {
    let n = sorted.len();
    let mut left = vec![0u64; parent.len()];
    let mut right = parent.to_vec();
    let mut best: Option<(usize, f64)> = None;
    let parent_entropy = entropy_of_counts(parent);
    for i in 1..n {
        let prev = sorted[i - 1] as usize;
        left[classes[prev] as usize] += 1;
        right[classes[prev] as usize] -= 1;
        if i < min_leaf || n - i < min_leaf {
            continue;
        }
        if !(values[prev] < values[sorted[i] as usize]) {
            continue;
        }
        let gain = parent_entropy - partition_info(&[&left[..], &right[..]]);
        if best.is_none_or(|(_, g)| gain > g) {
            best = Some((i, gain));
        }
    }
    let (at, gain) = best?;
    let mut l = vec![0u64; parent.len()];
    for &r in &sorted[..at] {
        l[classes[r as usize] as usize] += 1;
    }
    let r: Vec<u64> = parent.iter().zip(&l).map(|(p, x)| p - x).collect();
    Some(Scored {
        test: Test::LessOrEqual(threshold_between(
            values[sorted[at - 1] as usize],
            values[sorted[at] as usize],
        )),
        gain,
        split_info: split_info(&[l, r]),
        layout: Layout::Cut(at),
    })
}

/// Multiway split on a nominal feature, one child per value seen at the
/// node. Needs at least two children with `min_leaf` rows.
pub(crate) fn score_nominal(
    rows: &[usize],
    codes: &[u32],
    values: &[String],
    classes: &[u32],
    parent: &[u64],
    min_leaf: usize,
) -> Option<Scored> {
    let n_classes = parent.len();
    let mut per_code = vec![vec![0u64; n_classes]; values.len()];
    for &r in rows {
        per_code[codes[r] as usize][classes[r] as usize] += 1;
    }
    let mut map = vec![None; values.len()];
    let mut parts = Vec::new();
    let mut names = Vec::new();
    for (code, counts) in per_code.into_iter().enumerate() {
        if counts.iter().any(|&c| c > 0) {
            map[code] = Some(parts.len());
            parts.push(counts);
            names.push(values[code].clone());
        }
    }
    if parts.len() < 2 {
        return None;
    }
    let big = parts
        .iter()
        .filter(|c| c.iter().sum::<u64>() >= min_leaf as u64)
        .count();
    if big < 2 {
        return None;
    }
    Some(Scored {
        gain: split_gain(parent, &parts),
        split_info: split_info(&parts),
        test: Test::Nominal(names),
        layout: Layout::Codes(map),
    })
}

/// Picks among per-feature candidates `(feature, scored)` listed in
/// ascending feature order. Gain: highest gain. Gain ratio: highest ratio
/// among candidates whose gain is at least the average.
pub(crate) fn choose(candidates: Vec<(usize, Scored)>, criterion: SplitCriterion) -> Option<(usize, Scored)> {
    let positive: Vec<(usize, Scored)> = candidates.into_iter().filter(|(_, s)| s.gain > MIN_GAIN).collect();
    if positive.is_empty() {
        return None;
    }
    match criterion {
        SplitCriterion::Gain => {
            let mut best: Option<(usize, Scored)> = None;
            for c in positive {
                if best.as_ref().is_none_or(|b| c.1.gain > b.1.gain) {
                    best = Some(c);
                }
            }
            best
        }
        SplitCriterion::GainRatio => {
            let average = positive.iter().map(|(_, s)| s.gain).sum::<f64>() / positive.len() as f64;
            let mut best: Option<(usize, Scored, f64)> = None;
            for (f, s) in positive {
                if s.gain + 1e-9 < average || s.split_info <= 0.0 {
                    continue;
                }
                let ratio = s.gain / s.split_info;
                if best.as_ref().is_none_or(|b| ratio > b.2) {
                    best = Some((f, s, ratio));
                }
            }
            best.map(|(f, s, _)| (f, s))
        }
    }
}

pub(crate) fn class_counts(rows: &[usize], classes: &[u32], n_classes: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n_classes];
    for &r in rows {
        counts[classes[r] as usize] += 1;
    }
    counts
}

/// Best split of `rows` over `features` (1-based), or `None` when no split
/// has positive gain within the minimum leaf size.
///
/// Features are examined in ascending index order and thresholds in
/// ascending order, so ties go to the lower feature, then the lower
/// threshold.
pub fn best_split(
    d: &Dataset,
    rows: &[usize],
    features: &[usize],
    params: &TreeParams,
) -> Result<Option<SplitCandidate>> {
    if features.is_empty() {
        return Err(Error::EmptyFeatureSet);
    }
    if rows.len() < 2 {
        return Ok(None);
    }
    let mut features = features.to_vec();
    features.sort_unstable();
    features.dedup();
    let classes = d.labels();
    let parent = class_counts(rows, classes, d.n_classes());
    let mut candidates = Vec::new();
    for &f in &features {
        let data = FeatureData::of(d.column(f)?);
        let scored = match &data {
            FeatureData::Continuous(values) => {
                let mut sorted: Vec<u32> = rows.iter().map(|&r| r as u32).collect();
                sorted.sort_by(|&a, &b| values[a as usize].total_cmp(&values[b as usize]).then(a.cmp(&b)));
                scan_continuous(&sorted, values, classes, &parent, params.min_leaf).map(|s| (s, Some(sorted)))
            }
            FeatureData::Nominal { codes, values } => {
                score_nominal(rows, codes, values, classes, &parent, params.min_leaf).map(|s| (s, None))
            }
        };
        if let Some((s, sorted)) = scored {
            candidates.push((f, s, sorted));
        }
    }
    let sorted_lists: Vec<(usize, Option<Vec<u32>>)> =
        candidates.iter_mut().map(|(f, _, s)| (*f, s.take())).collect();
    let chosen = choose(
        candidates.into_iter().map(|(f, s, _)| (f, s)).collect(),
        params.criterion,
    );
    let Some((feature, scored)) = chosen else {
        return Ok(None);
    };
    let partitions = match &scored.layout {
        Layout::Cut(at) => {
            let sorted = sorted_lists
                .into_iter()
                .find(|(f, _)| *f == feature)
                .and_then(|(_, s)| s)
                .expect("continuous candidate keeps its ordering");
            let mut left: Vec<usize> = sorted[..*at].iter().map(|&r| r as usize).collect();
            let mut right: Vec<usize> = sorted[*at..].iter().map(|&r| r as usize).collect();
            left.sort_unstable();
            right.sort_unstable();
            vec![left, right]
        }
        Layout::Codes(map) => {
            let Column::Nominal { codes, .. } = d.column(feature)? else {
                unreachable!("nominal layout on nominal column")
            };
            let n_children = map.iter().flatten().count();
            let mut parts = vec![Vec::new(); n_children];
            for &r in rows {
                let child = map[codes[r] as usize].expect("every node value has a child");
                parts[child].push(r);
            }
            parts
        }
    };
    Ok(Some(SplitCandidate {
        feature,
        test: scored.test,
        partitions,
        gain: scored.gain,
        split_info: scored.split_info,
    }))
}
