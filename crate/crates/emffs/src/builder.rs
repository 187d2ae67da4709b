//! Row-at-a-time construction of an NSL-KDD [`Dataset`], shared by the CSV
//! and ARFF readers.

use std::collections::HashMap;
use std::sync::Arc;

use emffs_core::dataset::BINARY_LABELS;
use emffs_core::{Column, Dataset, FeatureKind, Schema};

use crate::{FormatError, FormatResult};

/// Interns tokens in first-seen order, or against a closed value list.
#[derive(Debug, Default)]
pub(crate) struct Interner {
    values: Vec<String>,
    lookup: HashMap<String, u32>,
    closed: bool,
}

impl Interner {
    pub(crate) fn seeded<I: IntoIterator<Item = String>>(values: I, closed: bool) -> Self {
        let mut me = Interner {
            closed: false,
            ..Default::default()
        };
        for v in values {
            me.code(&v);
        }
        me.closed = closed;
        me
    }

    /// `None` when the value list is closed and `token` is not on it.
    pub(crate) fn code(&mut self, token: &str) -> Option<u32> {
        if let Some(&c) = self.lookup.get(token) {
            return Some(c);
        }
        if self.closed {
            return None;
        }
        let c = self.values.len() as u32;
        self.values.push(token.to_string());
        self.lookup.insert(token.to_string(), c);
        Some(c)
    }
}

enum Acc {
    Numeric(Vec<f64>),
    Nominal(Vec<u32>, Interner),
}

pub(crate) struct Builder {
    schema: Arc<Schema>,
    columns: Vec<Acc>,
    labels: Vec<u32>,
    label_names: Interner,
}

/// A label token must name a class: non-empty and not a number.
fn plausible_label(tok: &str) -> bool {
    !tok.is_empty() && tok.parse::<f64>().is_err()
}

pub(crate) fn parse_number(tok: &str) -> Option<f64> {
    tok.parse::<f64>().ok().filter(|v| v.is_finite())
}

impl Builder {
    /// Class labels are interned after `normal` and `anomaly`, so a
    /// binarized export reads back with the canonical class codes.
    pub(crate) fn new(schema: Arc<Schema>) -> Self {
        let columns = schema
            .features()
            .iter()
            .map(|f| match f.kind {
                FeatureKind::Continuous => Acc::Numeric(Vec::new()),
                FeatureKind::Nominal => Acc::Nominal(Vec::new(), Interner::default()),
            })
            .collect();
        Self {
            schema,
            columns,
            labels: Vec::new(),
            label_names: Interner::seeded(BINARY_LABELS.iter().map(|s| s.to_string()), false),
        }
    }

    /// Fixes the value list of a nominal feature (ARFF declarations).
    pub(crate) fn declare_values(&mut self, position: usize, values: Vec<String>) {
        if let Acc::Nominal(_, interner) = &mut self.columns[position] {
            *interner = Interner::seeded(values, true);
        }
    }

    /// Fixes the label list (ARFF class declaration). The binary names keep
    /// codes 0 and 1 when present.
    pub(crate) fn declare_labels(&mut self, mut values: Vec<String>) {
        let binary: Vec<String> = BINARY_LABELS.iter().map(|s| s.to_string()).collect();
        if binary.iter().all(|b| values.contains(b)) {
            values.retain(|v| !binary.contains(v));
            values.splice(0..0, binary);
        }
        self.label_names = Interner::seeded(values, true);
    }

    /// Appends one instance; `row` is only used in error messages.
    pub(crate) fn push<'a, I>(&mut self, row: u64, features: I, label: &str) -> FormatResult<()>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut seen = 0;
        for ((tok, acc), spec) in features.into_iter().zip(&mut self.columns).zip(self.schema.features()) {
            seen += 1;
            match acc {
                Acc::Numeric(v) => {
                    let x = parse_number(tok).ok_or_else(|| {
                        FormatError::row(row, format!("`{}` is not a finite number: `{tok}`", spec.name))
                    })?;
                    v.push(x);
                }
                Acc::Nominal(codes, interner) => {
                    if tok == "?" {
                        return Err(FormatError::row(row, format!("missing value for `{}`", spec.name)));
                    }
                    let c = interner.code(tok).ok_or_else(|| {
                        FormatError::row(row, format!("`{tok}` is not a declared value of `{}`", spec.name))
                    })?;
                    codes.push(c);
                }
            }
        }
        if seen != self.schema.len() {
            return Err(FormatError::row(
                row,
                format!("{seen} feature values, expected {}", self.schema.len()),
            ));
        }
        if !plausible_label(label) {
            return Err(FormatError::row(row, format!("unknown label token `{label}`")));
        }
        let code = self
            .label_names
            .code(label)
            .ok_or_else(|| FormatError::row(row, format!("unknown label token `{label}`")))?;
        self.labels.push(code);
        Ok(())
    }

    pub(crate) fn finish(self) -> FormatResult<Dataset> {
        if self.labels.is_empty() {
            return Err(emffs_core::Error::Empty.into());
        }
        let columns = self
            .columns
            .into_iter()
            .map(|acc| match acc {
                Acc::Numeric(v) => Column::Numeric(v),
                Acc::Nominal(codes, interner) => Column::Nominal {
                    codes,
                    values: interner.values,
                },
            })
            .collect();
        Ok(Dataset::new(
            self.schema,
            columns,
            self.label_names.values,
            self.labels,
        )?)
    }
}
