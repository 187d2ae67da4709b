use alloc::vec;
use alloc::vec::Vec;

use super::split::{choose, class_counts, scan_continuous, score_nominal, FeatureData, Layout};
use super::{Node, NodeKind, TreeModel, TreeParams};
use crate::dataset::Dataset;
use crate::{Error, Result};

/// Grows a tree on every row of `d` using the given features, then prunes
/// it when `params.prune_confidence` is set.
pub fn train_tree(d: &Dataset, features: &[usize], params: &TreeParams) -> Result<TreeModel> {
    let rows: Vec<usize> = (0..d.len()).collect();
    train_tree_on(d, &rows, features, params)
}

struct Work {
    id: usize,
    rows: Vec<usize>,
    counts: Vec<u64>,
    /// Rows sorted by value, one list per continuous feature.
    sorted: Vec<Option<Vec<u32>>>,
}

/// Grows (and optionally prunes) a tree on a subset of rows.
///
/// Continuous features are sorted once at the root; each split partitions
/// the sorted lists stably, so no node re-sorts.
pub fn train_tree_on(d: &Dataset, rows: &[usize], features: &[usize], params: &TreeParams) -> Result<TreeModel> {
    params.validate()?;
    if rows.is_empty() {
        return Err(Error::Empty);
    }
    if features.is_empty() {
        return Err(Error::EmptyFeatureSet);
    }
    let mut features = features.to_vec();
    features.sort_unstable();
    features.dedup();
    let data: Vec<FeatureData<'_>> = features
        .iter()
        .map(|&f| d.column(f).map(FeatureData::of))
        .collect::<Result<_>>()?;

    let classes = d.labels();
    let n_classes = d.n_classes();
    let mut root_rows = rows.to_vec();
    root_rows.sort_unstable();
    let root_sorted = data
        .iter()
        .map(|fd| match fd {
            FeatureData::Continuous(values) => {
                let mut s: Vec<u32> = root_rows.iter().map(|&r| r as u32).collect();
                s.sort_by(|&a, &b| values[a as usize].total_cmp(&values[b as usize]).then(a.cmp(&b)));
                Some(s)
            }
            FeatureData::Nominal { .. } => None,
        })
        .collect();

    let is_leaf = |counts: &[u64]| {
        let n: u64 = counts.iter().sum();
        counts.iter().filter(|&&c| c > 0).count() <= 1 || n < 2 * params.min_leaf as u64
    };

    let mut nodes = vec![Node {
        class_counts: Vec::new(),
        kind: NodeKind::Leaf,
    }];
    let mut mark = vec![u32::MAX; d.len()];
    let root_counts = class_counts(&root_rows, classes, n_classes);
    let mut stack = vec![Work {
        id: 0,
        rows: root_rows,
        counts: root_counts,
        sorted: root_sorted,
    }];

    while let Some(work) = stack.pop() {
        nodes[work.id].class_counts = work.counts.clone();
        if is_leaf(&work.counts) {
            continue;
        }
        let candidates: Vec<_> = data
            .iter()
            .zip(&work.sorted)
            .zip(&features)
            .filter_map(|((fd, sorted), &f)| {
                let scored = match fd {
                    FeatureData::Continuous(values) => scan_continuous(
                        sorted.as_deref().expect("continuous feature has a sorted list"),
                        values,
                        classes,
                        &work.counts,
                        params.min_leaf,
                    ),
                    FeatureData::Nominal { codes, values } => {
                        score_nominal(&work.rows, codes, values, classes, &work.counts, params.min_leaf)
                    }
                };
                scored.map(|s| (f, s))
            })
            .collect();
        let Some((feature, scored)) = choose(candidates, params.criterion) else {
            continue;
        };
        let slot = features.binary_search(&feature).expect("chosen feature is a candidate");

        let n_children = match &scored.layout {
            Layout::Cut(at) => {
                let sorted = work.sorted[slot].as_ref().expect("continuous");
                for (i, &r) in sorted.iter().enumerate() {
                    mark[r as usize] = u32::from(i >= *at);
                }
                2
            }
            Layout::Codes(map) => {
                let FeatureData::Nominal { codes, .. } = &data[slot] else {
                    unreachable!("code layout belongs to a nominal feature")
                };
                for &r in &work.rows {
                    mark[r] = map[codes[r] as usize].expect("value seen at node") as u32;
                }
                map.iter().flatten().count()
            }
        };

        let mut child_rows = vec![Vec::new(); n_children];
        for &r in &work.rows {
            child_rows[mark[r] as usize].push(r);
        }
        let first = nodes.len();
        let children: Vec<usize> = (first..first + n_children).collect();
        for _ in 0..n_children {
            nodes.push(Node {
                class_counts: Vec::new(),
                kind: NodeKind::Leaf,
            });
        }

        let mut pending = Vec::with_capacity(n_children);
        for (c, rows) in child_rows.into_iter().enumerate() {
            let counts = class_counts(&rows, classes, n_classes);
            let sorted = if is_leaf(&counts) {
                vec![None; data.len()]
            } else {
                work.sorted
                    .iter()
                    .map(|s| {
                        s.as_ref()
                            .map(|list| list.iter().copied().filter(|&r| mark[r as usize] == c as u32).collect())
                    })
                    .collect()
            };
            pending.push(Work {
                id: first + c,
                rows,
                counts,
                sorted,
            });
        }
        stack.extend(pending.into_iter().rev());

        nodes[work.id].kind = NodeKind::Split {
            feature,
            test: scored.test,
            gain: scored.gain,
            children,
        };
    }

    let tree = TreeModel {
        nodes,
        params: *params,
        class_names: d.label_names().to_vec(),
    };
    Ok(match params.prune_confidence {
        Some(cf) => super::prune_tree(&tree, cf)?,
        None => tree,
    })
}
