//! Filter rankers: per-feature relevance scores and deterministic ranking.

mod info;
pub mod relieff;

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use info::{
    chi_squared_presence, chi_squared_score, conditional_entropy, entropy, gain_ratio_score, info_gain_score,
    ContingencyTable, ProbabilityDistribution,
};
pub use relieff::{relieff_weights, Neighbors, ReliefF, ReliefFParams};

use crate::dataset::Dataset;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FilterMethod {
    InfoGain,
    GainRatio,
    ChiSquared,
    #[cfg_attr(feature = "serde", serde(rename = "relieff"))]
    ReliefF,
}

impl FilterMethod {
    pub const ALL: [FilterMethod; 4] = [
        FilterMethod::InfoGain,
        FilterMethod::GainRatio,
        FilterMethod::ChiSquared,
        FilterMethod::ReliefF,
    ];

    /// Machine name used in files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            FilterMethod::InfoGain => "info_gain",
            FilterMethod::GainRatio => "gain_ratio",
            FilterMethod::ChiSquared => "chi_squared",
            FilterMethod::ReliefF => "relieff",
        }
    }

    /// Human-readable name for report tables.
    pub fn title(self) -> &'static str {
        match self {
            FilterMethod::InfoGain => "Info Gain",
            FilterMethod::GainRatio => "Gain Ratio",
            FilterMethod::ChiSquared => "Chi-squared",
            FilterMethod::ReliefF => "ReliefF",
        }
    }

    /// Whether the scorer works on discretized columns.
    pub fn needs_discretization(self) -> bool {
        !matches!(self, FilterMethod::ReliefF)
    }
}

impl fmt::Display for FilterMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        match norm.as_str() {
            "info_gain" | "ig" | "infogain" => Ok(FilterMethod::InfoGain),
            "gain_ratio" | "gr" | "gainratio" => Ok(FilterMethod::GainRatio),
            "chi_squared" | "chi2" | "chi_square" | "chisquared" => Ok(FilterMethod::ChiSquared),
            "relieff" | "relief_f" => Ok(FilterMethod::ReliefF),
            _ => Err(Error::Parameter(alloc::format!("unknown filter method `{s}`"))),
        }
    }
}

/// Scores every feature of a discretized dataset with an entropy or
/// chi-squared ranker. Indexed by 0-based column position.
pub fn discrete_scores(method: FilterMethod, d: &Dataset) -> Result<Vec<f64>> {
    d.schema()
        .indices()
        .map(|f| {
            let t = ContingencyTable::for_feature(d, f)?;
            Ok(match method {
                FilterMethod::InfoGain => t.info_gain(),
                FilterMethod::GainRatio => t.gain_ratio(),
                FilterMethod::ChiSquared => t.chi_squared(),
                FilterMethod::ReliefF => {
                    return Err(Error::Parameter("ReliefF is scored on raw data".into()));
                }
            })
        })
        .collect()
}

/// Features of one ranker, best first.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RankedFeatureList {
    pub method: FilterMethod,
    /// `(1-based feature index, score)`, descending score, ties by index.
    pub entries: Vec<(usize, f64)>,
}

impl RankedFeatureList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn features(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }
}

/// Sorts `(feature, score)` pairs by descending score, breaking ties by
/// ascending feature index. The result does not depend on input order.
pub fn rank_features(method: FilterMethod, scores: &[(usize, f64)]) -> Result<RankedFeatureList> {
    if let Some(&(f, _)) = scores.iter().find(|(_, s)| s.is_nan()) {
        return Err(Error::NanScore(f));
    }
    if let Some(&(f, s)) = scores.iter().find(|(_, s)| s.is_infinite()) {
        return Err(Error::Parameter(alloc::format!("score {s} for feature {f} is not finite")));
    }
    let mut entries = scores.to_vec();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut idx: Vec<usize> = entries.iter().map(|e| e.0).collect();
    idx.sort_unstable();
    if idx.windows(2).any(|w| w[0] == w[1]) || idx.first() == Some(&0) {
        return Err(Error::Parameter("feature indices must be unique and 1-based".into()));
    }
    Ok(RankedFeatureList { method, entries })
}

/// Ranks position-indexed scores (`scores[i]` belongs to feature `i + 1`).
pub fn rank_positional(method: FilterMethod, scores: &[f64]) -> Result<RankedFeatureList> {
    let pairs: Vec<(usize, f64)> = scores.iter().enumerate().map(|(i, &s)| (i + 1, s)).collect();
    rank_features(method, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn ranking_examples() {
        let r = rank_features(FilterMethod::InfoGain, &[(1, 0.2), (2, 0.9)]).unwrap();
        assert_eq!(r.features().collect::<Vec<_>>(), vec![2, 1]);
        let tie = rank_features(FilterMethod::InfoGain, &[(7, 0.5), (3, 0.5)]).unwrap();
        assert_eq!(tie.features().collect::<Vec<_>>(), vec![3, 7]);
    }

    #[test]
    fn ranking_errors() {
        assert_eq!(
            rank_features(FilterMethod::ChiSquared, &[(1, f64::NAN)]),
            Err(Error::NanScore(1))
        );
        assert!(rank_features(FilterMethod::ChiSquared, &[(1, f64::INFINITY)]).is_err());
        assert!(rank_features(FilterMethod::ChiSquared, &[(1, 0.1), (1, 0.2)]).is_err());
        assert!(rank_features(FilterMethod::ChiSquared, &[(0, 0.1)]).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in FilterMethod::ALL {
            assert_eq!(m.name().parse::<FilterMethod>().unwrap(), m);
        }
        assert_eq!("Chi-Squared".parse::<FilterMethod>().unwrap(), FilterMethod::ChiSquared);
        assert!("pca".parse::<FilterMethod>().is_err());
    }

    proptest! {
        #[test]
        fn ranking_is_order_invariant_permutation(
            scores in proptest::collection::vec(0u8..5, 1..41),
            seed in any::<u64>(),
        ) {
            use rand::{seq::SliceRandom, SeedableRng};
            let pairs: Vec<(usize, f64)> = scores.iter().enumerate().map(|(i, &s)| (i + 1, s as f64 / 4.0)).collect();
            let mut shuffled = pairs.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let a = rank_features(FilterMethod::ReliefF, &pairs).unwrap();
            let b = rank_features(FilterMethod::ReliefF, &shuffled).unwrap();
            prop_assert_eq!(&a, &b);
            let mut idx: Vec<usize> = a.features().collect();
            idx.sort_unstable();
            prop_assert_eq!(idx, (1..=pairs.len()).collect::<Vec<_>>());
            for w in a.entries.windows(2) {
                prop_assert!(w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0));
            }
        }
    }
}
