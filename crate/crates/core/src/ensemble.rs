//! Ensemble selection over several filter rankings: keep the top fraction
//! of each ranking, count how many rankings kept each feature, and select
//! the features whose count reaches the threshold.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use crate::filters::{FilterMethod, RankedFeatureList};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnsembleConfig {
    /// Minimum number of filters that must keep a feature.
    pub threshold: usize,
    /// Fraction of each ranked list retained before voting.
    pub split_fraction: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            threshold: 3,
            split_fraction: 1.0 / 3.0,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self, n_filters: usize) -> Result<()> {
        if !(self.split_fraction > 0.0 && self.split_fraction <= 1.0) {
            return Err(Error::Fraction(self.split_fraction));
        }
        if self.threshold == 0 || self.threshold > n_filters {
            return Err(Error::Parameter(format!(
                "threshold {} outside 1..={n_filters}",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// The retained head of one ranking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSubset {
    pub method: FilterMethod,
    pub features: BTreeSet<usize>,
}

/// `ceil(n_total * fraction)`, at least one. A tiny tolerance keeps exact
/// products such as `3 * (1/3)` from rounding up.
pub fn split_size(n_total: usize, fraction: f64) -> usize {
    let raw = n_total as f64 * fraction;
    let size = libm::ceil(raw - 1e-9) as usize;
    size.clamp(1.min(n_total), n_total)
}

/// First `ceil(n_total * fraction)` features of a ranking.
pub fn top_fraction(r: &RankedFeatureList, n_total: usize, fraction: f64) -> Result<FeatureSubset> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Fraction(fraction));
    }
    if r.len() != n_total {
        return Err(Error::Parameter(format!(
            "{} ranking has {} entries, expected {n_total}",
            r.method,
            r.len()
        )));
    }
    Ok(FeatureSubset {
        method: r.method,
        features: r.features().take(split_size(n_total, fraction)).collect(),
    })
}

/// One-third split.
pub fn top_third(r: &RankedFeatureList, n_total: usize) -> Result<FeatureSubset> {
    top_fraction(r, n_total, 1.0 / 3.0)
}

/// Number of subsets containing each feature that appears at all.
pub fn combine_counts(subsets: &[FeatureSubset]) -> BTreeMap<usize, usize> {
    let mut counts = BTreeMap::new();
    for s in subsets {
        for &f in &s.features {
            *counts.entry(f).or_insert(0) += 1;
        }
    }
    counts
}

/// Features kept by the vote, ascending, with every counted feature's
/// occurrence count.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectedFeatureSet {
    pub features: Vec<usize>,
    pub counts: BTreeMap<usize, usize>,
    pub threshold: usize,
}

impl SelectedFeatureSet {
    /// A selection that simply lists features (for example the full set).
    pub fn from_features<I: IntoIterator<Item = usize>>(features: I) -> Self {
        let features: BTreeSet<usize> = features.into_iter().collect();
        Self {
            counts: features.iter().map(|&f| (f, 1)).collect(),
            features: features.into_iter().collect(),
            threshold: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn contains(&self, feature: usize) -> bool {
        self.features.binary_search(&feature).is_ok()
    }
}

/// Keeps exactly the features with `count >= threshold`.
pub fn ensemble_select(counts: &BTreeMap<usize, usize>, cfg: &EnsembleConfig) -> Result<SelectedFeatureSet> {
    if cfg.threshold == 0 {
        return Err(Error::Parameter("threshold must be at least 1".into()));
    }
    let features: Vec<usize> = counts
        .iter()
        .filter(|(_, &c)| c >= cfg.threshold)
        .map(|(&f, _)| f)
        .collect();
    if features.is_empty() {
        log::warn!("no feature reached the vote threshold {}", cfg.threshold);
    }
    Ok(SelectedFeatureSet {
        features,
        counts: counts.clone(),
        threshold: cfg.threshold,
    })
}

/// The whole vote: split each ranking, count, select.
pub fn emffs_select(rankings: &[RankedFeatureList], n_total: usize, cfg: &EnsembleConfig) -> Result<SelectedFeatureSet> {
    cfg.validate(rankings.len())?;
    let subsets = rankings
        .iter()
        .map(|r| top_fraction(r, n_total, cfg.split_fraction))
        .collect::<Result<Vec<_>>>()?;
    ensemble_select(&combine_counts(&subsets), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const PUBLISHED_TOP14: [(FilterMethod, [usize; 14]); 4] = [
        (FilterMethod::InfoGain, [5, 3, 6, 4, 30, 29, 33, 34, 35, 38, 12, 39, 25, 23]),
        (FilterMethod::GainRatio, [12, 26, 4, 25, 39, 6, 30, 38, 5, 29, 3, 37, 34, 33]),
        (FilterMethod::ChiSquared, [5, 3, 6, 4, 29, 30, 33, 34, 35, 12, 23, 38, 25, 39]),
        (FilterMethod::ReliefF, [3, 29, 4, 32, 38, 33, 39, 12, 36, 23, 26, 34, 40, 31]),
    ];

    fn subsets() -> Vec<FeatureSubset> {
        PUBLISHED_TOP14
            .iter()
            .map(|(m, f)| FeatureSubset {
                method: *m,
                features: f.iter().copied().collect(),
            })
            .collect()
    }

    fn ranked(method: FilterMethod, order: &[usize]) -> RankedFeatureList {
        RankedFeatureList {
            method,
            entries: order.iter().enumerate().map(|(i, &f)| (f, -(i as f64))).collect(),
        }
    }

    #[test]
    fn split_sizes() {
        assert_eq!(split_size(41, 1.0 / 3.0), 14);
        assert_eq!(split_size(3, 1.0 / 3.0), 1);
        assert_eq!(split_size(6, 1.0 / 3.0), 2);
        assert_eq!(split_size(41, 1.0), 41);
        assert_eq!(split_size(41, 0.001), 1);
        let r = ranked(FilterMethod::InfoGain, &(1..=41).collect::<Vec<_>>());
        assert_eq!(top_third(&r, 41).unwrap().features.len(), 14);
        assert_eq!(top_fraction(&r, 41, 1.0).unwrap().features.len(), 41);
        assert!(top_fraction(&r, 40, 0.5).is_err());
        assert!(top_fraction(&r, 41, 0.0).is_err());
    }

    #[test]
    fn published_tallies() {
        let counts = combine_counts(&subsets());
        assert_eq!(counts[&12], 4);
        assert_eq!(counts[&35], 2);
        assert_eq!(counts[&37], 1);
    }

    #[test]
    fn published_selection() {
        let counts = combine_counts(&subsets());
        let sel = ensemble_select(&counts, &EnsembleConfig::default()).unwrap();
        assert_eq!(sel.features, vec![3, 4, 5, 6, 12, 23, 25, 29, 30, 33, 34, 38, 39]);
        let all_four = ensemble_select(&counts, &EnsembleConfig { threshold: 4, ..Default::default() }).unwrap();
        assert_eq!(all_four.features, vec![3, 4, 12, 29, 33, 34, 38, 39]);
        let union = ensemble_select(&counts, &EnsembleConfig { threshold: 1, ..Default::default() }).unwrap();
        let expected: BTreeSet<usize> = subsets().iter().flat_map(|s| s.features.iter().copied()).collect();
        assert_eq!(union.features, expected.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn identical_and_disjoint() {
        let same: Vec<FeatureSubset> = (0..4)
            .map(|_| FeatureSubset {
                method: FilterMethod::InfoGain,
                features: [1, 2, 3].into_iter().collect(),
            })
            .collect();
        assert!(combine_counts(&same).values().all(|&c| c == 4));
        let disjoint: Vec<FeatureSubset> = (0..3)
            .map(|i| FeatureSubset {
                method: FilterMethod::InfoGain,
                features: [i * 2 + 1, i * 2 + 2].into_iter().collect(),
            })
            .collect();
        assert!(combine_counts(&disjoint).values().all(|&c| c == 1));
    }

    #[test]
    fn full_pipeline_from_rankings() {
        let rankings: Vec<RankedFeatureList> = PUBLISHED_TOP14
            .iter()
            .map(|(m, head)| {
                let mut order = head.to_vec();
                order.extend((1..=41).filter(|f| !head.contains(f)));
                ranked(*m, &order)
            })
            .collect();
        let sel = emffs_select(&rankings, 41, &EnsembleConfig::default()).unwrap();
        assert_eq!(sel.len(), 13);
        assert!(emffs_select(&rankings, 41, &EnsembleConfig { threshold: 5, ..Default::default() }).is_err());
    }

    #[test]
    fn empty_selection_is_not_an_error() {
        let counts = combine_counts(&subsets()[..1]);
        let sel = ensemble_select(&counts, &EnsembleConfig { threshold: 2, ..Default::default() }).unwrap();
        assert!(sel.is_empty());
        assert!(ensemble_select(&counts, &EnsembleConfig { threshold: 0, ..Default::default() }).is_err());
        assert_eq!(vec![1usize; 0], sel.features);
    }
}
