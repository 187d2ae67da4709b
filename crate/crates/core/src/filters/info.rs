//! Entropy-based scorers (information gain, gain ratio) and the
//! chi-squared statistic, all computed from a feature-by-class contingency
//! table of a discretized dataset.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::math::{entropy_of_counts, plogp};
use crate::{Error, Result};

/// A discrete probability distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution(Vec<f64>);

impl ProbabilityDistribution {
    /// Probabilities must be non-negative and sum to one within `1e-9`.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::Parameter("negative or NaN probability".into()));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter(alloc::format!("probabilities sum to {sum}")));
        }
        Ok(Self(p))
    }

    /// Empirical distribution of counts. Empty or all-zero counts give an
    /// empty distribution.
    pub fn from_counts(counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Self(Vec::new());
        }
        Self(counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }
}

/// Shannon entropy in bits, `0 log 0 = 0`.
pub fn entropy(p: &ProbabilityDistribution) -> f64 {
    p.0.iter().map(|&x| plogp(x)).sum()
}

/// Joint counts of feature value (rows) against class (columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    n_values: usize,
    n_classes: usize,
    counts: Vec<u64>,
}

impl ContingencyTable {
    pub fn from_codes(codes: &[u32], arity: usize, classes: &[u32], n_classes: usize) -> Self {
        debug_assert_eq!(codes.len(), classes.len());
        let mut counts = vec![0u64; arity * n_classes];
        for (&v, &c) in codes.iter().zip(classes) {
            counts[v as usize * n_classes + c as usize] += 1;
        }
        Self {
            n_values: arity,
            n_classes,
            counts,
        }
    }

    /// From explicit rows (one per feature value).
    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let n_classes = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_classes) {
            return Err(Error::Parameter("ragged contingency table".into()));
        }
        Ok(Self {
            n_values: rows.len(),
            n_classes,
            counts: rows.iter().flatten().copied().collect(),
        })
    }

    /// Table of feature `feature` (1-based) against the class of a
    /// discretized dataset.
    pub fn for_feature(d: &Dataset, feature: usize) -> Result<Self> {
        let (codes, arity) = d
            .column(feature)?
            .discrete()
            .ok_or(Error::NotDiscrete(feature))?;
        Ok(Self::from_codes(codes, arity, d.labels(), d.n_classes()))
    }

    pub fn n_values(&self) -> usize {
        self.n_values
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn count(&self, value: usize, class: usize) -> u64 {
        self.counts[value * self.n_classes + class]
    }

    pub fn row(&self, value: usize) -> &[u64] {
        &self.counts[value * self.n_classes..(value + 1) * self.n_classes]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn value_totals(&self) -> Vec<u64> {
        (0..self.n_values).map(|v| self.row(v).iter().sum()).collect()
    }

    pub fn class_totals(&self) -> Vec<u64> {
        let mut t = vec![0u64; self.n_classes];
        for v in 0..self.n_values {
            for (c, &x) in self.row(v).iter().enumerate() {
                t[c] += x;
            }
        }
        t
    }

    /// `H(class)`.
    pub fn class_entropy(&self) -> f64 {
        entropy_of_counts(&self.class_totals())
    }

    /// `H(class | feature) = sum_v P(v) H(class | feature = v)`.
    pub fn conditional_entropy(&self) -> f64 {
        let n = self.total();
        if n == 0 {
            return 0.0;
        }
        (0..self.n_values)
            .map(|v| {
                let row = self.row(v);
                let nv: u64 = row.iter().sum();
                if nv == 0 {
                    0.0
                } else {
                    nv as f64 / n as f64 * entropy_of_counts(row)
                }
            })
            .sum()
    }

    /// Entropy of the feature's own value distribution.
    pub fn intrinsic_value(&self) -> f64 {
        entropy_of_counts(&self.value_totals())
    }

    pub fn info_gain(&self) -> f64 {
        (self.class_entropy() - self.conditional_entropy()).max(0.0)
    }

    /// `IG / IV`, and 0 for a feature with a single observed value.
    pub fn gain_ratio(&self) -> f64 {
        let iv = self.intrinsic_value();
        if iv <= 0.0 {
            return 0.0;
        }
        (self.info_gain() / iv).clamp(0.0, 1.0)
    }

    /// Pearson's statistic `sum (O - E)^2 / E`; cells with zero expected
    /// count contribute nothing.
    pub fn chi_squared(&self) -> f64 {
        let n = self.total() as f64;
        if n == 0.0 {
            return 0.0;
        }
        let rows = self.value_totals();
        let cols = self.class_totals();
        let mut chi = 0.0;
        for (v, &rv) in rows.iter().enumerate() {
            for (c, &cc) in cols.iter().enumerate() {
                let expected = rv as f64 * cc as f64 / n;
                if expected > 0.0 {
                    let diff = self.count(v, c) as f64 - expected;
                    chi += diff * diff / expected;
                }
            }
        }
        chi
    }
}

/// The presence/absence form of chi-squared over a 2x2 table:
/// `N [P(r,c) P(!r,!c) - P(r,!c) P(!r,c)]^2 / [P(r) P(!r) P(c) P(!c)]`.
///
/// Returns 0 when any marginal is empty.
pub fn chi_squared_presence(
    present_in_class: u64,
    present_not_class: u64,
    absent_in_class: u64,
    absent_not_class: u64,
) -> f64 {
    let n = (present_in_class + present_not_class + absent_in_class + absent_not_class) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p_rc = present_in_class as f64 / n;
    let p_rnc = present_not_class as f64 / n;
    let p_nrc = absent_in_class as f64 / n;
    let p_nrnc = absent_not_class as f64 / n;
    let p_r = p_rc + p_rnc;
    let p_nr = p_nrc + p_nrnc;
    let p_c = p_rc + p_nrc;
    let p_nc = p_rnc + p_nrnc;
    let denom = p_r * p_nr * p_c * p_nc;
    if denom == 0.0 {
        return 0.0;
    }
    let cross = p_rc * p_nrnc - p_rnc * p_nrc;
    n * cross * cross / denom
}

/// `H(class | feature)` for a discretized feature.
pub fn conditional_entropy(d: &Dataset, feature: usize) -> Result<f64> {
    Ok(ContingencyTable::for_feature(d, feature)?.conditional_entropy())
}

pub fn info_gain_score(d: &Dataset, feature: usize) -> Result<f64> {
    Ok(ContingencyTable::for_feature(d, feature)?.info_gain())
}

pub fn gain_ratio_score(d: &Dataset, feature: usize) -> Result<f64> {
    Ok(ContingencyTable::for_feature(d, feature)?.gain_ratio())
}

pub fn chi_squared_score(t: &ContingencyTable) -> f64 {
    t.chi_squared()
}
