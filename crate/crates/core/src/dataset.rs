//! Columnar, immutable instance storage plus the sampling and fold helpers
//! that operate on it.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::schema::{FeatureKind, Schema};
use crate::{Error, Result, ANOMALY, NORMAL};

/// Label names of a binarized dataset, indexed by class code.
pub const BINARY_LABELS: [&str; 2] = ["normal", "anomaly"];

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    /// Interned categorical values; `values[codes[i]]` is the token.
    Nominal { codes: Vec<u32>, values: Vec<String> },
    /// Interval indices produced by a discretizer, `0..bins`.
    Binned { codes: Vec<u32>, bins: u32 },
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Nominal { codes, .. } | Column::Binned { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Codes and arity when the column holds discrete values.
    pub fn discrete(&self) -> Option<(&[u32], usize)> {
        match self {
            Column::Numeric(_) => None,
            Column::Nominal { codes, values } => Some((codes, values.len())),
            Column::Binned { codes, bins } => Some((codes, *bins as usize)),
        }
    }

    /// Numeric view of one cell. Binned codes read as their interval
    /// number; nominal cells have no numeric value.
    pub fn numeric(&self, row: usize) -> Option<f64> {
        match self {
            Column::Numeric(v) => Some(v[row]),
            Column::Binned { codes, .. } => Some(codes[row] as f64),
            Column::Nominal { .. } => None,
        }
    }

    /// The nominal token at `row`, if this is a nominal column.
    pub fn token(&self, row: usize) -> Option<&str> {
        match self {
            Column::Nominal { codes, values } => Some(values[codes[row] as usize].as_str()),
            _ => None,
        }
    }

    fn select(&self, rows: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&r| v[r]).collect()),
            Column::Nominal { codes, values } => Column::Nominal {
                codes: rows.iter().map(|&r| codes[r]).collect(),
                values: values.clone(),
            },
            Column::Binned { codes, bins } => Column::Binned {
                codes: rows.iter().map(|&r| codes[r]).collect(),
                bins: *bins,
            },
        }
    }

    fn matches(&self, kind: FeatureKind) -> bool {
        matches!(
            (self, kind),
            (Column::Nominal { .. }, FeatureKind::Nominal)
                | (Column::Numeric(_), FeatureKind::Continuous)
                | (Column::Binned { .. }, FeatureKind::Continuous)
        )
    }
}

/// Instances stored column-wise with an interned class label per row.
///
/// Immutable once built; cheap to clone (the schema is shared).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Arc<Schema>,
    columns: Vec<Column>,
    label_names: Vec<String>,
    labels: Vec<u32>,
}

impl Dataset {
    /// Validates column kinds and lengths against the schema.
    pub fn new(
        schema: Arc<Schema>,
        columns: Vec<Column>,
        label_names: Vec<String>,
        labels: Vec<u32>,
    ) -> Result<Self> {
        if columns.len() != schema.len() {
            return Err(Error::Schema(alloc::format!(
                "{} columns for {} features",
                columns.len(),
                schema.len()
            )));
        }
        let n = labels.len();
        for (spec, col) in schema.features().iter().zip(&columns) {
            if col.len() != n {
                return Err(Error::ColumnLength {
                    feature: spec.index,
                    got: col.len(),
                    expected: n,
                });
            }
            if !col.matches(spec.kind) {
                return Err(Error::Schema(alloc::format!(
                    "column for `{}` does not match kind {:?}",
                    spec.name,
                    spec.kind
                )));
            }
        }
        if let Some(&bad) = labels.iter().find(|&&c| c as usize >= label_names.len()) {
            return Err(Error::Schema(alloc::format!("label code {bad} has no name")));
        }
        Ok(Self {
            schema,
            columns,
            label_names,
            labels,
        })
    }

    /// Builds a binarized dataset directly from class codes
    /// ([`NORMAL`]/[`ANOMALY`]).
    pub fn binary(schema: Arc<Schema>, columns: Vec<Column>, classes: Vec<u32>) -> Result<Self> {
        Self::new(
            schema,
            columns,
            BINARY_LABELS.iter().map(|s| s.to_string()).collect(),
            classes,
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn shared_schema(&self) -> Arc<Schema> {
        Arc::clone(&self.schema)
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    /// Column of a 1-based feature index.
    pub fn column(&self, feature: usize) -> Result<&Column> {
        let pos = self.schema.position(feature)?;
        Ok(&self.columns[pos])
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn label_name(&self, row: usize) -> &str {
        &self.label_names[self.labels[row] as usize]
    }

    pub fn n_classes(&self) -> usize {
        self.label_names.len()
    }

    pub fn class_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n_classes()];
        for &c in &self.labels {
            counts[c as usize] += 1;
        }
        counts
    }

    pub fn is_binarized(&self) -> bool {
        self.label_names.len() == 2
            && self.label_names[NORMAL as usize] == BINARY_LABELS[0]
            && self.label_names[ANOMALY as usize] == BINARY_LABELS[1]
    }

    pub fn ensure_binarized(&self) -> Result<()> {
        if self.is_binarized() {
            Ok(())
        } else {
            Err(Error::NotBinarized)
        }
    }

    /// Maps every label other than `normal` to `anomaly`.
    ///
    /// Idempotent. Labels that are not known NSL-KDD attack names still map
    /// to anomaly, with a warning.
    pub fn binarize_labels(&self) -> Dataset {
        if self.is_binarized() {
            return self.clone();
        }
        let map: Vec<u32> = self
            .label_names
            .iter()
            .map(|name| {
                if name == "normal" {
                    NORMAL
                } else {
                    if !is_known_attack(name) {
                        log::warn!("unrecognised label `{name}` treated as anomaly");
                    }
                    ANOMALY
                }
            })
            .collect();
        Dataset {
            schema: Arc::clone(&self.schema),
            columns: self.columns.clone(),
            label_names: BINARY_LABELS.iter().map(|s| s.to_string()).collect(),
            labels: self.labels.iter().map(|&c| map[c as usize]).collect(),
        }
    }

    /// New dataset made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            schema: Arc::clone(&self.schema),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
            label_names: self.label_names.clone(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
        }
    }

    /// Same rows and labels with replacement columns (used by the
    /// discretizer).
    pub fn with_columns(&self, columns: Vec<Column>) -> Result<Dataset> {
        Dataset::new(
            Arc::clone(&self.schema),
            columns,
            self.label_names.clone(),
            self.labels.clone(),
        )
    }

    /// Row indices grouped by class code.
    pub fn rows_by_class(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.n_classes()];
        for (row, &c) in self.labels.iter().enumerate() {
            groups[c as usize].push(row);
        }
        groups
    }
}

const ATTACK_NAMES: [&str; 39] = [
    "back",
    "land",
    "neptune",
    "pod",
    "smurf",
    "teardrop",
    "apache2",
    "mailbomb",
    "processtable",
    "udpstorm",
    "ipsweep",
    "nmap",
    "portsweep",
    "satan",
    "mscan",
    "saint",
    "ftp_write",
    "guess_passwd",
    "imap",
    "multihop",
    "phf",
    "spy",
    "warezclient",
    "warezmaster",
    "sendmail",
    "named",
    "snmpgetattack",
    "snmpguess",
    "xlock",
    "xsnoop",
    "worm",
    "buffer_overflow",
    "loadmodule",
    "perl",
    "rootkit",
    "httptunnel",
    "ps",
    "sqlattack",
    "xterm",
];

fn is_known_attack(name: &str) -> bool {
    name == "anomaly" || name == "attack" || ATTACK_NAMES.contains(&name)
}

/// Draws `round(fraction * count)` rows from each class with a seeded
/// shuffle. Selected rows keep their original relative order.
pub fn stratified_sample(d: &Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Fraction(fraction));
    }
    d.ensure_binarized()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = Vec::new();
    for mut rows in d.rows_by_class() {
        let take = libm::round(fraction * rows.len() as f64) as usize;
        rows.shuffle(&mut rng);
        chosen.extend_from_slice(&rows[..take.min(rows.len())]);
    }
    chosen.sort_unstable();
    Ok(d.select_rows(&chosen))
}

/// Per-instance fold ids for k-fold cross-validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub k: usize,
    pub assignment: Vec<u32>,
    pub seed: u64,
}

impl FoldAssignment {
    /// `(training rows, validation rows)` for one fold, both ascending.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (row, &f) in self.assignment.iter().enumerate() {
            if f as usize == fold {
                test.push(row);
            } else {
                train.push(row);
            }
        }
        (train, test)
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f as usize] += 1;
        }
        sizes
    }
}

/// Stratified fold assignment: rows of each class are shuffled with a
/// seeded PRNG, the class lists are concatenated in class-code order and
/// dealt round-robin over the folds.
///
/// Dealing continues across class boundaries, so total fold sizes differ
/// by at most one as well as per-class counts.
pub fn stratified_kfold(d: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    let n = d.len();
    if k < 2 || k > n {
        return Err(Error::FoldCount { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0u32; n];
    let mut slot = 0usize;
    for mut rows in d.rows_by_class() {
        rows.shuffle(&mut rng);
        for row in rows {
            assignment[row] = (slot % k) as u32;
            slot += 1;
        }
    }
    Ok(FoldAssignment { k, assignment, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn toy(classes: &[u32]) -> Dataset {
        let schema = Arc::new(Schema::from_kinds([("x", FeatureKind::Continuous)]).unwrap());
        let xs = (0..classes.len()).map(|i| i as f64).collect();
        Dataset::binary(schema, vec![Column::Numeric(xs)], classes.to_vec()).unwrap()
    }

    fn raw(labels: &[&str]) -> Dataset {
        let schema = Arc::new(Schema::from_kinds([("x", FeatureKind::Continuous)]).unwrap());
        let mut names: Vec<String> = Vec::new();
        let codes = labels
            .iter()
            .map(|l| match names.iter().position(|n| n == l) {
                Some(p) => p as u32,
                None => {
                    names.push(l.to_string());
                    (names.len() - 1) as u32
                }
            })
            .collect();
        let xs = (0..labels.len()).map(|i| i as f64).collect();
        Dataset::new(schema, vec![Column::Numeric(xs)], names, codes).unwrap()
    }

    #[test]
    fn construction_checks_lengths() {
        let schema = Arc::new(Schema::from_kinds([("x", FeatureKind::Continuous)]).unwrap());
        let err = Dataset::binary(schema.clone(), vec![Column::Numeric(vec![1.0])], vec![0, 1]);
        assert!(matches!(err, Err(Error::ColumnLength { .. })));
        let kind = Dataset::binary(
            schema,
            vec![Column::Nominal {
                codes: vec![0],
                values: vec!["a".into()],
            }],
            vec![0],
        );
        assert!(matches!(kind, Err(Error::Schema(_))));
    }

    #[test]
    fn binarize_maps_attacks() {
        let d = raw(&["neptune", "normal", "smurf", "normal", "mystery"]).binarize_labels();
        assert!(d.is_binarized());
        assert_eq!(d.labels(), &[1, 0, 1, 0, 1]);
        assert_eq!(d.label_name(0), "anomaly");
        assert_eq!(d.label_name(1), "normal");
        assert_eq!(d.binarize_labels(), d);
    }

    #[test]
    fn binarize_all_normal_still_has_both_names() {
        let d = raw(&["normal", "normal"]).binarize_labels();
        assert!(d.is_binarized());
        assert_eq!(d.class_counts(), vec![2, 0]);
    }

    #[test]
    fn sample_fraction_bounds() {
        let d = toy(&[0, 1]);
        assert_eq!(stratified_sample(&d, 0.0, 1), Err(Error::Fraction(0.0)));
        assert_eq!(stratified_sample(&d, 1.5, 1), Err(Error::Fraction(1.5)));
        assert!(stratified_sample(&raw(&["normal"]), 0.5, 1).is_err());
    }

    #[test]
    fn sample_identity_and_half() {
        let classes: Vec<u32> = (0..20).map(|i| (i % 2) as u32).collect();
        let d = toy(&classes);
        assert_eq!(stratified_sample(&d, 1.0, 3).unwrap(), d);
        let half = stratified_sample(&d, 0.5, 3).unwrap();
        assert_eq!(half.class_counts(), vec![5, 5]);
        assert_eq!(half, stratified_sample(&d, 0.5, 3).unwrap());
    }

    #[test]
    fn kfold_examples() {
        let d = toy(&[0; 100]);
        let f = stratified_kfold(&d, 10, 7).unwrap();
        assert_eq!(f.fold_sizes(), vec![10; 10]);

        let mut classes = vec![0u32; 90];
        classes.extend([1u32; 10]);
        let d = toy(&classes);
        let f = stratified_kfold(&d, 10, 7).unwrap();
        for fold in 0..10 {
            let (_, test) = f.split(fold);
            let anomalies = test.iter().filter(|&&r| d.labels()[r] == 1).count();
            assert_eq!(anomalies, 1);
        }

        let d = toy(&[0, 1, 0, 1, 1]);
        let f = stratified_kfold(&d, 5, 0).unwrap();
        assert_eq!(f.fold_sizes(), vec![1; 5]);
    }

    #[test]
    fn kfold_range() {
        let d = toy(&[0, 1, 0]);
        assert_eq!(stratified_kfold(&d, 1, 0), Err(Error::FoldCount { k: 1, n: 3 }));
        assert_eq!(stratified_kfold(&d, 4, 0), Err(Error::FoldCount { k: 4, n: 3 }));
    }

    proptest! {
        #[test]
        fn kfold_invariants(classes in proptest::collection::vec(0u32..2, 2..120), k in 2usize..12, seed in any::<u64>()) {
            let d = toy(&classes);
            prop_assume!(k <= d.len());
            let f = stratified_kfold(&d, k, seed).unwrap();
            prop_assert_eq!(&f, &stratified_kfold(&d, k, seed).unwrap());
            let sizes = f.fold_sizes();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            let counts = d.class_counts();
            for fold in 0..k {
                let (train, test) = f.split(fold);
                prop_assert_eq!(train.len() + test.len(), d.len());
                for (c, &total) in counts.iter().enumerate() {
                    let got = test.iter().filter(|&&r| d.labels()[r] as usize == c).count() as f64;
                    let exact = total as f64 / k as f64;
                    prop_assert!((got - exact).abs() < 1.0 + 1e-9);
                }
            }
            let mut seen = BTreeSet::new();
            for fold in 0..k {
                for row in f.split(fold).1 {
                    prop_assert!(seen.insert(row));
                }
            }
            prop_assert_eq!(seen.len(), d.len());
        }

        #[test]
        fn sample_counts(classes in proptest::collection::vec(0u32..2, 1..200), fraction in 0.01f64..=1.0, seed in any::<u64>()) {
            let d = toy(&classes);
            let s = stratified_sample(&d, fraction, seed).unwrap();
            for (got, total) in s.class_counts().iter().zip(d.class_counts()) {
                let want = fraction * total as f64;
                prop_assert!((*got as f64 - want).abs() <= 1.0);
            }
        }
    }
}
