//! The term-level piece relation: `s` is a piece of `t` when `s` is obtained
//! from `t` by deleting nodes. Deleting a node splices its children into its
//! place in the parent's sequence, keeping their order. The hole of a context
//! is never deleted.
//!
//! This module computes the relation literally, as the closure of single-node
//! deletions, and is the ground truth the algebraic piece relation is checked
//! against.

use std::collections::{BTreeSet, HashSet};

use super::{Node, Term, TermError};

/// All results of deleting exactly one labelled node from `nodes`.
fn delete_one(nodes: &[Node]) -> Vec<Vec<Node>> {
    let mut out = Vec::new();
    for (i, node) in nodes.iter().enumerate() {
        if let Node::Tree { label, children } = node {
            let mut spliced = Vec::with_capacity(nodes.len() + children.len());
            spliced.extend_from_slice(&nodes[..i]);
            spliced.extend_from_slice(children);
            spliced.extend_from_slice(&nodes[i + 1..]);
            out.push(spliced);

            for smaller in delete_one(children) {
                let mut copy = nodes.to_vec();
                copy[i] = Node::Tree {
                    label: label.clone(),
                    children: smaller,
                };
                out.push(copy);
            }
        }
    }
    out
}

/// Every piece of `term`, including `term` itself.
pub fn pieces_of(term: &Term) -> BTreeSet<Term> {
    let mut seen: HashSet<Vec<Node>> = HashSet::new();
    let mut frontier = vec![term.roots().to_vec()];
    seen.insert(term.roots().to_vec());
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for nodes in &frontier {
            for smaller in delete_one(nodes) {
                if seen.insert(smaller.clone()) {
                    next.push(smaller);
                }
            }
        }
        frontier = next;
    }
    seen.into_iter()
        .map(|nodes| term.with_roots(nodes))
        .collect()
}

/// Whether `s` is a piece of `t`, by breadth-first deletion search.
///
/// Each deletion removes exactly one node, so the search proceeds level by
/// level in node count and stops once it reaches the size of `s`.
pub fn is_piece_term(s: &Term, t: &Term) -> Result<bool, TermError> {
    if s.kind() != t.kind() {
        return Err(TermError::KindMismatch);
    }
    let target_size = s.node_count();
    let mut size = t.node_count();
    if target_size > size {
        return Ok(false);
    }
    let target = s.roots();
    let mut frontier: HashSet<Vec<Node>> = HashSet::new();
    frontier.insert(t.roots().to_vec());
    while size > target_size {
        let mut next = HashSet::new();
        for nodes in &frontier {
            next.extend(delete_one(nodes));
        }
        frontier = next;
        size -= 1;
    }
    Ok(frontier.iter().any(|nodes| nodes.as_slice() == target))
}
