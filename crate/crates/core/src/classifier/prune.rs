//! Error-based pruning by subtree replacement.
//!
//! A node's pessimistic error is its training errors plus the extra errors
//! implied by the upper confidence limit of the binomial error rate. A
//! subtree is replaced by a leaf whenever the leaf's estimate does not
//! exceed the summed estimate of the subtree's leaves.

use alloc::vec::Vec;

use super::{Node, NodeKind, TreeModel};
use crate::math::normal_quantile;
use crate::{Error, Result};

/// Extra errors to add to `errors` observed among `n` cases at confidence
/// `cf` (C4.5's `AddErrs`).
pub fn add_errors(n: f64, errors: f64, cf: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    if errors < 1.0 {
        let base = n * (1.0 - libm::pow(cf, 1.0 / n));
        if errors == 0.0 {
            return base;
        }
        return base + errors * (add_errors(n, 1.0, cf) - base);
    }
    if errors + 0.5 >= n {
        return (n - errors).max(0.0);
    }
    let z = normal_quantile(1.0 - cf);
    let f = (errors + 0.5) / n;
    let r = (f + z * z / (2.0 * n) + z * libm::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) / (1.0 + z * z / n);
    r * n - errors
}

fn leaf_estimate(node: &Node, cf: f64) -> f64 {
    let n = node.total() as f64;
    let errors = n - node.class_counts[node.label() as usize] as f64;
    errors + add_errors(n, errors, cf)
}

/// Returns the subtree's estimated error, collapsing it in `nodes` when a
/// leaf would do no worse.
fn prune_node(nodes: &mut [Node], id: usize, cf: f64) -> f64 {
    let children = match &nodes[id].kind {
        NodeKind::Leaf => return leaf_estimate(&nodes[id], cf),
        NodeKind::Split { children, .. } => children.clone(),
    };
    let subtree: f64 = children.iter().map(|&c| prune_node(nodes, c, cf)).sum();
    let as_leaf = leaf_estimate(&nodes[id], cf);
    if as_leaf <= subtree {
        nodes[id].kind = NodeKind::Leaf;
        as_leaf
    } else {
        subtree
    }
}

/// Bottom-up subtree replacement at confidence `cf` in `(0, 0.5]`.
pub fn prune_tree(t: &TreeModel, cf: f64) -> Result<TreeModel> {
    if !(cf > 0.0 && cf <= 0.5) {
        return Err(Error::Parameter(alloc::format!("pruning confidence {cf} outside (0, 0.5]")));
    }
    let mut nodes = t.nodes.clone();
    prune_node(&mut nodes, 0, cf);

    // Drop unreachable nodes, renumbering in pre-order.
    let mut order = Vec::new();
    let mut stack = alloc::vec![0usize];
    while let Some(id) = stack.pop() {
        order.push(id);
        if let NodeKind::Split { children, .. } = &nodes[id].kind {
            stack.extend(children.iter().rev());
        }
    }
    let mut new_id = alloc::vec![usize::MAX; nodes.len()];
    for (i, &old) in order.iter().enumerate() {
        new_id[old] = i;
    }
    let compact = order
        .iter()
        .map(|&old| {
            let mut node = nodes[old].clone();
            if let NodeKind::Split { children, .. } = &mut node.kind {
                for c in children.iter_mut() {
                    *c = new_id[*c];
                }
            }
            node
        })
        .collect();
    let mut params = t.params;
    params.prune_confidence = Some(cf);
    Ok(TreeModel {
        nodes: compact,
        params,
        class_names: t.class_names.clone(),
    })
}
