//! Exhaustive enumeration of small terms, used by the brute-force oracles.
//!
//! Terms come out ordered by node count, then by rendered text (byte order).

use super::{Alphabet, Context, Forest, Node, Term, TermKind};

struct Tables {
    forests: Vec<Vec<Vec<Node>>>,
    contexts: Vec<Vec<Vec<Node>>>,
}

fn join(head: &Node, rest: &[Node]) -> Vec<Node> {
    let mut v = Vec::with_capacity(rest.len() + 1);
    v.push(head.clone());
    v.extend_from_slice(rest);
    v
}

/// Node sequences with exactly `n` labelled nodes, for every `n <= max`.
fn build(alphabet: &Alphabet, max: usize, with_contexts: bool) -> Tables {
    let mut forests: Vec<Vec<Vec<Node>>> = vec![vec![Vec::new()]];
    let mut contexts: Vec<Vec<Vec<Node>>> = vec![vec![vec![Node::Hole]]];
    for n in 1..=max {
        let mut fs = Vec::new();
        for k in 1..=n {
            for label in alphabet.letters() {
                for children in &forests[k - 1] {
                    let tree = Node::Tree {
                        label: label.clone(),
                        children: children.clone(),
                    };
                    for rest in &forests[n - k] {
                        fs.push(join(&tree, rest));
                    }
                }
            }
        }
        forests.push(fs);

        if with_contexts {
            let mut cs = Vec::new();
            for rest in &forests[n] {
                cs.push(join(&Node::Hole, rest));
            }
            for k in 1..=n {
                for label in alphabet.letters() {
                    for inner in &contexts[k - 1] {
                        let tree = Node::Tree {
                            label: label.clone(),
                            children: inner.clone(),
                        };
                        for rest in &forests[n - k] {
                            cs.push(join(&tree, rest));
                        }
                    }
                    for children in &forests[k - 1] {
                        let tree = Node::Tree {
                            label: label.clone(),
                            children: children.clone(),
                        };
                        for rest in &contexts[n - k] {
                            cs.push(join(&tree, rest));
                        }
                    }
                }
            }
            contexts.push(cs);
        }
    }
    Tables { forests, contexts }
}

fn sorted_by_text<T: ToString>(items: Vec<T>) -> Vec<T> {
    let mut keyed: Vec<(String, T)> = items.into_iter().map(|t| (t.to_string(), t)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, t)| t).collect()
}

/// Every forest with at most `max_nodes` nodes, each exactly once.
pub fn enumerate_forests(alphabet: &Alphabet, max_nodes: usize) -> Vec<Forest> {
    let tables = build(alphabet, max_nodes, false);
    tables
        .forests
        .into_iter()
        .flat_map(|bucket| {
            sorted_by_text(bucket.into_iter().map(|roots| Forest { roots }).collect())
        })
        .collect()
}

/// Every context with at most `max_nodes` nodes, each exactly once.
pub fn enumerate_contexts(alphabet: &Alphabet, max_nodes: usize) -> Vec<Context> {
    let tables = build(alphabet, max_nodes, true);
    tables
        .contexts
        .into_iter()
        .flat_map(|bucket| {
            sorted_by_text(bucket.into_iter().map(|roots| Context { roots }).collect())
        })
        .collect()
}

pub fn enumerate_terms(alphabet: &Alphabet, max_nodes: usize, kind: TermKind) -> Vec<Term> {
    match kind {
        TermKind::Forest => enumerate_forests(alphabet, max_nodes)
            .into_iter()
            .map(Term::Forest)
            .collect(),
        TermKind::Context => enumerate_contexts(alphabet, max_nodes)
            .into_iter()
            .map(Term::Context)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rendered(terms: &[Term]) -> Vec<String> {
        terms.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn tiny_cases() {
        let a = Alphabet::new(["a"]);
        assert_eq!(rendered(&enumerate_terms(&a, 0, TermKind::Forest)), ["0"]);
        assert_eq!(
            rendered(&enumerate_terms(&a, 1, TermKind::Forest)),
            ["0", "a"]
        );
        assert_eq!(
            rendered(&enumerate_terms(&a, 1, TermKind::Context)),
            ["[]", "[]+a", "a([])", "a+[]"]
        );
    }

    #[test]
    fn two_letters_two_nodes() {
        let ab = Alphabet::new(["a", "b"]);
        let all = rendered(&enumerate_terms(&ab, 2, TermKind::Forest));
        assert_eq!(
            all,
            ["0", "a", "b", "a(a)", "a(b)", "a+a", "a+b", "b(a)", "b(b)", "b+a", "b+b"]
        );
    }

    #[test]
    fn empty_alphabet() {
        let none = Alphabet::default();
        assert_eq!(
            rendered(&enumerate_terms(&none, 4, TermKind::Forest)),
            ["0"]
        );
        assert_eq!(
            rendered(&enumerate_terms(&none, 4, TermKind::Context)),
            ["[]"]
        );
    }
}
