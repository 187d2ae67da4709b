use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("no instances")]
    Empty,
    #[error("schema: {0}")]
    Schema(String),
    #[error("column for feature {feature} has {got} values, expected {expected}")]
    ColumnLength {
        feature: usize,
        got: usize,
        expected: usize,
    },
    #[error("label vector has {got} entries, expected {expected}")]
    LabelLength { got: usize, expected: usize },
    #[error("labels are not binarized to normal/anomaly")]
    NotBinarized,
    #[error("unknown feature index {0}")]
    UnknownFeature(usize),
    #[error("feature {0} is not discrete; discretize it first")]
    NotDiscrete(usize),
    #[error("sample fraction {0} outside (0, 1]")]
    Fraction(f64),
    #[error("fold count {k} outside 2..={n}")]
    FoldCount { k: usize, n: usize },
    #[error("score for feature {0} is NaN")]
    NanScore(usize),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty feature set")]
    EmptyFeatureSet,
    #[error("invalid parameter: {0}")]
    Parameter(String),
}
