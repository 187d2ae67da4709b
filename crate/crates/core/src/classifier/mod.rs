//! C4.5-style decision trees: greedy entropy splits with binary
//! `<= threshold` tests on continuous features and one branch per observed
//! value on nominal features, followed by optional error-based pruning.

mod prune;
mod split;
mod train;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use prune::{add_errors, prune_tree};
pub use split::{best_split, partition_info, split_gain, split_info, SplitCandidate, MIN_GAIN};
pub use train::{train_tree, train_tree_on};

use crate::dataset::Dataset;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SplitCriterion {
    /// Information gain.
    #[default]
    Gain,
    /// Gain ratio among splits with at least average gain.
    GainRatio,
}

impl FromStr for SplitCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gain" | "info_gain" => Ok(SplitCriterion::Gain),
            "gain_ratio" | "gainratio" => Ok(SplitCriterion::GainRatio),
            other => Err(Error::Parameter(alloc::format!("unknown split criterion `{other}`"))),
        }
    }
}

impl fmt::Display for SplitCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitCriterion::Gain => "gain",
            SplitCriterion::GainRatio => "gain_ratio",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeParams {
    pub criterion: SplitCriterion,
    /// Minimum rows on each side of a continuous split, and in at least two
    /// branches of a nominal split.
    pub min_leaf: usize,
    /// Pruning confidence in `(0, 0.5]`; `None` keeps the grown tree.
    pub prune_confidence: Option<f64>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            criterion: SplitCriterion::Gain,
            min_leaf: 2,
            prune_confidence: Some(0.25),
        }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_leaf == 0 {
            return Err(Error::Parameter("min_leaf must be at least 1".into()));
        }
        if let Some(cf) = self.prune_confidence {
            if !(cf > 0.0 && cf <= 0.5) {
                return Err(Error::Parameter(alloc::format!("pruning confidence {cf} outside (0, 0.5]")));
            }
        }
        Ok(())
    }
}

/// Test at an internal node.
#[derive(Debug, Clone, PartialEq)]
pub enum Test {
    /// Child 0 takes `value <= threshold`, child 1 the rest.
    LessOrEqual(f64),
    /// Child `i` takes the token `values[i]`.
    Nominal(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Leaf,
    Split {
        feature: usize,
        test: Test,
        gain: f64,
        children: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    /// Training rows reaching this node, per class.
    pub class_counts: Vec<u64>,
    pub kind: NodeKind,
}

impl Node {
    /// Majority class; ties go to the lower class code.
    pub fn label(&self) -> u32 {
        majority(&self.class_counts)
    }

    pub fn total(&self) -> u64 {
        self.class_counts.iter().sum()
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf)
    }
}

pub(crate) fn majority(counts: &[u64]) -> u32 {
    let mut best = 0;
    for (c, &n) in counts.iter().enumerate() {
        if n > counts[best] {
            best = c;
        }
    }
    best as u32
}

/// A trained tree. Node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    nodes: Vec<Node>,
    params: TreeParams,
    class_names: Vec<String>,
}

impl TreeModel {
    /// Rebuilds a tree from its parts, checking the structure.
    pub fn from_parts(nodes: Vec<Node>, params: TreeParams, class_names: Vec<String>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Parameter("tree has no nodes".into()));
        }
        let mut parent_seen = alloc::vec![false; nodes.len()];
        for node in &nodes {
            if node.class_counts.len() != class_names.len() {
                return Err(Error::Parameter("class count width differs from class names".into()));
            }
            if let NodeKind::Split { test, children, .. } = &node.kind {
                let expected = match test {
                    Test::LessOrEqual(_) => 2,
                    Test::Nominal(v) => v.len(),
                };
                if children.len() < 2 || children.len() != expected {
                    return Err(Error::Parameter("internal node with a bad child list".into()));
                }
                for &c in children {
                    if c == 0 || c >= nodes.len() || parent_seen[c] {
                        return Err(Error::Parameter(alloc::format!("bad child link {c}")));
                    }
                    parent_seen[c] = true;
                }
            }
        }
        Ok(Self {
            nodes,
            params,
            class_names,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(t: &TreeModel, id: usize) -> usize {
            match &t.nodes[id].kind {
                NodeKind::Leaf => 0,
                NodeKind::Split { children, .. } => 1 + children.iter().map(|&c| walk(t, c)).max().unwrap_or(0),
            }
        }
        walk(self, 0)
    }

    /// Features tested anywhere in the tree, ascending.
    pub fn features_used(&self) -> Vec<usize> {
        let mut f: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n.kind {
                NodeKind::Split { feature, .. } => Some(feature),
                NodeKind::Leaf => None,
            })
            .collect();
        f.sort_unstable();
        f.dedup();
        f
    }

    /// Class code predicted for one row of `d`.
    ///
    /// A nominal value not seen at a node, or a cell whose kind does not fit
    /// the test, follows the child that received the most training rows.
    pub fn predict(&self, d: &Dataset, row: usize) -> u32 {
        let mut id = 0;
        loop {
            let node = &self.nodes[id];
            let NodeKind::Split {
                feature, test, children, ..
            } = &node.kind
            else {
                return node.label();
            };
            let col = d.column(*feature).ok();
            let branch = match test {
                Test::LessOrEqual(t) => col.and_then(|c| c.numeric(row)).map(|v| usize::from(v > *t)),
                Test::Nominal(values) => col
                    .and_then(|c| c.token(row))
                    .and_then(|tok| values.iter().position(|v| v == tok)),
            };
            id = match branch {
                Some(b) => children[b],
                None => self.largest_child(children),
            };
        }
    }

    fn largest_child(&self, children: &[usize]) -> usize {
        let mut best = children[0];
        for &c in &children[1..] {
            if self.nodes[c].total() > self.nodes[best].total() {
                best = c;
            }
        }
        best
    }

    pub fn predict_rows(&self, d: &Dataset, rows: &[usize]) -> Vec<u32> {
        rows.iter().map(|&r| self.predict(d, r)).collect()
    }

    pub fn predict_all(&self, d: &Dataset) -> Vec<u32> {
        (0..d.len()).map(|r| self.predict(d, r)).collect()
    }
}
