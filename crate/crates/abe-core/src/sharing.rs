//! Shamir sharing of a secret down an access tree and Lagrange
//! recombination back up. Public so that tests and tools can inspect the
//! per-node shares.

use rand::Rng;

use crate::attribute::Attribute;
use crate::field::Fe;
use crate::tree::AccessTree;

/// Random polynomial of degree `threshold - 1` with `q(0) = secret`.
pub fn random_polynomial<R: Rng + ?Sized>(secret: Fe, threshold: usize, rng: &mut R) -> Vec<Fe> {
    let mut coeffs = Vec::with_capacity(threshold);
    coeffs.push(secret);
    coeffs.extend((1..threshold).map(|_| Fe::random(rng)));
    coeffs
}

pub fn eval_polynomial(coeffs: &[Fe], x: u64) -> Fe {
    let x = Fe::new(x);
    coeffs.iter().rev().fold(Fe::ZERO, |acc, c| acc * x + *c)
}

/// Lagrange basis coefficients at zero for the given distinct nonzero
/// indices: `prod_{j != i} j / (j - i)`.
pub fn lagrange_at_zero(indices: &[u64]) -> Vec<Fe> {
    indices
        .iter()
        .map(|&i| {
            let (num, den) = indices.iter().filter(|&&j| j != i).fold((Fe::ONE, Fe::ONE), |(n, d), &j| {
                (n * Fe::new(j), d * (Fe::new(j) - Fe::new(i)))
            });
            num * den.inv().expect("indices are distinct")
        })
        .collect()
}

/// Shares `secret` over the tree. Returns the share of every node in
/// preorder; the root's share is `secret`.
pub fn share_nodes<R: Rng + ?Sized>(tree: &AccessTree, secret: Fe, rng: &mut R) -> Vec<Fe> {
    let mut out = Vec::with_capacity(tree.node_count());
    share_into(tree, secret, rng, &mut out, &mut |_| {});
    out
}

/// Shares `secret` over the tree and returns only the leaf shares, in
/// preorder leaf order.
pub fn share_leaves<R: Rng + ?Sized>(tree: &AccessTree, secret: Fe, rng: &mut R) -> Vec<Fe> {
    let mut leaves = Vec::with_capacity(tree.leaf_count());
    let mut nodes = Vec::new();
    share_into(tree, secret, rng, &mut nodes, &mut |v| leaves.push(v));
    leaves
}

fn share_into<R: Rng + ?Sized>(
    tree: &AccessTree,
    secret: Fe,
    rng: &mut R,
    nodes: &mut Vec<Fe>,
    leaf: &mut impl FnMut(Fe),
) {
    nodes.push(secret);
    match tree {
        AccessTree::Leaf(_) => leaf(secret),
        AccessTree::Gate { threshold, children } => {
            let poly = random_polynomial(secret, *threshold, rng);
            for (i, child) in children.iter().enumerate() {
                share_into(child, eval_polynomial(&poly, i as u64 + 1), rng, nodes, leaf);
            }
        }
    }
}

/// Which satisfied children a gate recombines from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    #[default]
    LowestIndex,
    HighestIndex,
}

/// Recombines a value at the root from per-leaf values. `leaf_value`
/// receives the preorder leaf index and attribute and returns `None` for an
/// unsatisfied leaf. Returns `None` when the root is unsatisfied.
pub fn reconstruct(
    tree: &AccessTree,
    leaf_value: &mut impl FnMut(usize, &Attribute) -> Option<Fe>,
    selection: Selection,
) -> Option<Fe> {
    let mut next_leaf = 0;
    recombine(tree, leaf_value, selection, &mut next_leaf)
}

fn recombine(
    tree: &AccessTree,
    leaf_value: &mut impl FnMut(usize, &Attribute) -> Option<Fe>,
    selection: Selection,
    next_leaf: &mut usize,
) -> Option<Fe> {
    match tree {
        AccessTree::Leaf(a) => {
            let idx = *next_leaf;
            *next_leaf += 1;
            leaf_value(idx, a)
        }
        AccessTree::Gate { threshold, children } => {
            let mut got: Vec<(u64, Fe)> = children
                .iter()
                .enumerate()
                .filter_map(|(i, c)| recombine(c, leaf_value, selection, next_leaf).map(|v| (i as u64 + 1, v)))
                .collect();
            if got.len() < *threshold {
                return None;
            }
            if selection == Selection::HighestIndex {
                got.reverse();
            }
            got.truncate(*threshold);
            let indices: Vec<u64> = got.iter().map(|(i, _)| *i).collect();
            let coeffs = lagrange_at_zero(&indices);
            Some(got.iter().zip(coeffs).fold(Fe::ZERO, |acc, ((_, v), c)| acc + *v * c))
        }
    }
}
