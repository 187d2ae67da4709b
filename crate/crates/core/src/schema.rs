//! Feature schemas.
//!
//! Features are addressed by their 1-based index throughout the crate, the
//! same numbering used by NSL-KDD documentation. Column storage is 0-based;
//! [`Schema::position`] converts.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FeatureKind {
    /// Categorical; the value set lives with the column.
    Nominal,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpec {
    /// 1-based position.
    pub index: usize,
    pub name: String,
    pub kind: FeatureKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    features: Vec<FeatureSpec>,
}

/// NSL-KDD feature names in column order.
pub const NSL_KDD_FEATURES: [&str; 41] = [
    "duration",
    "protocol_type",
    "service",
    "flag",
    "src_bytes",
    "dst_bytes",
    "land",
    "wrong_fragment",
    "urgent",
    "hot",
    "num_failed_logins",
    "logged_in",
    "num_compromised",
    "root_shell",
    "su_attempted",
    "num_root",
    "num_file_creations",
    "num_shells",
    "num_access_files",
    "num_outbound_cmds",
    "is_host_login",
    "is_guest_login",
    "count",
    "srv_count",
    "serror_rate",
    "srv_serror_rate",
    "rerror_rate",
    "srv_rerror_rate",
    "same_srv_rate",
    "diff_srv_rate",
    "srv_diff_host_rate",
    "dst_host_count",
    "dst_host_srv_count",
    "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
];

/// 1-based indices of the NSL-KDD features that are nominal.
pub const NSL_KDD_NOMINAL: [usize; 7] = [2, 3, 4, 7, 12, 21, 22];

impl Schema {
    /// Builds a schema, checking that indices run 1..=n in order and names
    /// are unique.
    pub fn new(features: Vec<FeatureSpec>) -> Result<Self> {
        for (pos, f) in features.iter().enumerate() {
            if f.index != pos + 1 {
                return Err(Error::Schema(format!(
                    "feature `{}` has index {}, expected {}",
                    f.name,
                    f.index,
                    pos + 1
                )));
            }
            if features[..pos].iter().any(|g| g.name == f.name) {
                return Err(Error::Schema(format!("duplicate feature name `{}`", f.name)));
            }
        }
        Ok(Self { features })
    }

    /// Convenience constructor from `(name, kind)` pairs.
    pub fn from_kinds<'a, I>(features: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, FeatureKind)>,
    {
        Self::new(
            features
                .into_iter()
                .enumerate()
                .map(|(i, (name, kind))| FeatureSpec {
                    index: i + 1,
                    name: name.to_string(),
                    kind,
                })
                .collect(),
        )
    }

    /// The 41-feature NSL-KDD schema.
    pub fn nsl_kdd() -> Self {
        Self::from_kinds(NSL_KDD_FEATURES.iter().enumerate().map(|(i, name)| {
            let kind = if NSL_KDD_NOMINAL.contains(&(i + 1)) {
                FeatureKind::Nominal
            } else {
                FeatureKind::Continuous
            };
            (*name, kind)
        }))
        .expect("static schema is valid")
    }

    /// Checks that this schema is exactly the NSL-KDD one (names
    /// case-insensitive).
    pub fn validate_nsl_kdd(&self) -> Result<()> {
        if self.features.len() != NSL_KDD_FEATURES.len() {
            return Err(Error::Schema(format!(
                "expected {} features, found {}",
                NSL_KDD_FEATURES.len(),
                self.features.len()
            )));
        }
        let reference = Self::nsl_kdd();
        for (got, want) in self.features.iter().zip(reference.features.iter()) {
            if !got.name.eq_ignore_ascii_case(&want.name) {
                return Err(Error::Schema(format!(
                    "feature {} is `{}`, expected `{}`",
                    got.index, got.name, want.name
                )));
            }
            if got.kind != want.kind {
                return Err(Error::Schema(format!(
                    "feature {} (`{}`) has kind {:?}, expected {:?}",
                    got.index, got.name, got.kind, want.kind
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[FeatureSpec] {
        &self.features
    }

    /// Looks up a feature by its 1-based index.
    pub fn get(&self, index: usize) -> Result<&FeatureSpec> {
        index
            .checked_sub(1)
            .and_then(|p| self.features.get(p))
            .ok_or(Error::UnknownFeature(index))
    }

    /// 0-based column position of a 1-based feature index.
    pub fn position(&self, index: usize) -> Result<usize> {
        self.get(index).map(|_| index - 1)
    }

    pub fn name(&self, index: usize) -> Result<&str> {
        self.get(index).map(|f| f.name.as_str())
    }

    /// 1-based index of the feature called `name`.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features
            .iter()
            .find(|f| f.name.eq_ignore_ascii_case(name))
            .map(|f| f.index)
    }

    /// All 1-based indices in order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.features.iter().map(|f| f.index)
    }
}
