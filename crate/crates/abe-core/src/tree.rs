//! Threshold-gate access trees.

use crate::attribute::{Attribute, AttributeSet};
use crate::error::AbeError;
use crate::policy::PolicyExpr;

/// A leaf, or a `threshold`-of-n gate. Children are indexed from 1 in the
/// secret-sharing polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AccessTree {
    Leaf(Attribute),
    Gate { threshold: usize, children: Vec<AccessTree> },
}

impl AccessTree {
    /// A `threshold`-of-n gate; requires `1 <= threshold <= n`.
    pub fn gate(threshold: usize, children: Vec<AccessTree>) -> Result<AccessTree, AbeError> {
        if threshold == 0 || threshold > children.len() {
            return Err(AbeError::Malformed(format!(
                "threshold {threshold} with {} children",
                children.len()
            )));
        }
        Ok(AccessTree::Gate { threshold, children })
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            AccessTree::Leaf(_) => 1,
            AccessTree::Gate { children, .. } => children.iter().map(AccessTree::leaf_count).sum(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            AccessTree::Leaf(_) => 1,
            AccessTree::Gate { children, .. } => 1 + children.iter().map(AccessTree::node_count).sum::<usize>(),
        }
    }

    /// Leaf attributes in preorder.
    pub fn leaves(&self) -> Vec<&Attribute> {
        let mut out = Vec::with_capacity(self.leaf_count());
        self.visit_leaves(&mut |a| out.push(a));
        out
    }

    fn visit_leaves<'a>(&'a self, f: &mut impl FnMut(&'a Attribute)) {
        match self {
            AccessTree::Leaf(a) => f(a),
            AccessTree::Gate { children, .. } => children.iter().for_each(|c| c.visit_leaves(f)),
        }
    }

    /// Distinct leaf attributes.
    pub fn attributes(&self) -> AttributeSet {
        self.leaves().into_iter().cloned().collect()
    }
}

/// Compiles a policy: AND over n children becomes n-of-n, OR becomes 1-of-n.
/// Comparisons are expanded first; an always-true policy becomes a single
/// leaf on the reserved always-present attribute.
pub fn build_access_tree(policy: &PolicyExpr) -> Result<AccessTree, AbeError> {
    let normalized = if policy.is_normalized() { policy.clone() } else { policy.normalize()? };
    compile(&normalized)
}

fn compile(p: &PolicyExpr) -> Result<AccessTree, AbeError> {
    Ok(match p {
        PolicyExpr::Leaf(a) => AccessTree::Leaf(a.clone()),
        PolicyExpr::True => AccessTree::Leaf(Attribute::always()),
        PolicyExpr::False => return Err(AbeError::AlwaysFalse),
        PolicyExpr::And(c) => AccessTree::Gate {
            threshold: c.len(),
            children: c.iter().map(compile).collect::<Result<_, _>>()?,
        },
        PolicyExpr::Or(c) => AccessTree::Gate {
            threshold: 1,
            children: c.iter().map(compile).collect::<Result<_, _>>()?,
        },
        PolicyExpr::Compare { .. } => unreachable!("normalized policies hold no comparisons"),
    })
}

/// Whether `attrs` satisfies the tree. The reserved always attribute counts
/// as present in every set.
pub fn satisfies(tree: &AccessTree, attrs: &AttributeSet) -> bool {
    match tree {
        AccessTree::Leaf(a) => a.is_always() || attrs.contains(a),
        AccessTree::Gate { threshold, children } => {
            children.iter().filter(|c| satisfies(c, attrs)).take(*threshold).count() == *threshold
        }
    }
}
