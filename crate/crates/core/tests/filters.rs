use std::sync::Arc;

use emffs_core::filters::{chi_squared_score, relieff_weights, ContingencyTable, ReliefFParams};
use emffs_core::{rank_features, Column, Dataset, FeatureKind, FilterMethod, Schema};
use proptest::prelude::*;

fn codes(arity: u32, n: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..arity, n)
}

fn pairs() -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
    (1usize..80).prop_flat_map(|n| (codes(4, n), codes(3, n)))
}

proptest! {
    #[test]
    fn information_gain_is_symmetric((values, classes) in pairs()) {
        let forward = ContingencyTable::from_codes(&values, 4, &classes, 3).info_gain();
        let backward = ContingencyTable::from_codes(&classes, 3, &values, 4).info_gain();
        prop_assert!((forward - backward).abs() < 1e-12, "{forward} vs {backward}");
    }

    #[test]
    fn gain_is_entropy_drop((values, classes) in pairs()) {
        let t = ContingencyTable::from_codes(&values, 4, &classes, 3);
        prop_assert!((t.info_gain() - (t.class_entropy() - t.conditional_entropy())).abs() < 1e-12);
        prop_assert!(t.info_gain() >= -1e-12);
        prop_assert!(t.info_gain() <= t.class_entropy() + 1e-12);
    }

    #[test]
    fn gain_ratio_is_bounded((values, classes) in pairs()) {
        let t = ContingencyTable::from_codes(&values, 4, &classes, 3);
        let gr = t.gain_ratio();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&gr), "{gr}");
    }

    #[test]
    fn chi_squared_vanishes_on_product_tables(
        row in prop::collection::vec(1u64..20, 2..5),
        col in prop::collection::vec(1u64..20, 2..4),
    ) {
        let rows: Vec<Vec<u64>> = row.iter().map(|r| col.iter().map(|c| r * c).collect()).collect();
        let t = ContingencyTable::from_rows(&rows).unwrap();
        prop_assert!(chi_squared_score(&t).abs() < 1e-9);
    }

    #[test]
    fn relieff_ignores_power_of_two_scaling(
        cols in prop::collection::vec(prop::collection::vec(-50i32..50, 30), 1..4),
        labels in prop::collection::vec(0u32..2, 30),
        exponent in -8i32..8,
        k in 1usize..6,
    ) {
        let mut labels = labels;
        labels[0] = 0;
        labels[1] = 1;
        let build = |scale: f64| {
            let names: Vec<String> = (1..=cols.len()).map(|i| format!("x{i}")).collect();
            let schema = Arc::new(Schema::from_kinds(names.iter().map(|n| (n.as_str(), FeatureKind::Continuous))).unwrap());
            let columns = cols.iter().map(|c| Column::Numeric(c.iter().map(|&v| v as f64 * scale).collect())).collect();
            Dataset::binary(schema, columns, labels.clone()).unwrap()
        };
        let params = ReliefFParams { k_neighbors: k, m_samples: None, seed: 0 };
        let base = relieff_weights(&build(1.0), &params).unwrap();
        let scaled = relieff_weights(&build(2f64.powi(exponent)), &params).unwrap();
        prop_assert_eq!(base, scaled);
    }

    #[test]
    fn ranking_orders_by_score_then_index(scores in prop::collection::vec(0u8..4, 1..41)) {
        let scored: Vec<(usize, f64)> = scores.iter().enumerate().map(|(i, &s)| (i + 1, s as f64)).collect();
        let list = rank_features(FilterMethod::InfoGain, &scored).unwrap();
        for w in list.entries.windows(2) {
            prop_assert!(w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0));
        }
    }
}
