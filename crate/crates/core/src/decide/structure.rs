//! Reachability between forest types, stabilizers, and exhaustive checks
//! of the structural lemmas that follow from the identity.

use std::fmt;

use crate::algebra::ForestAlgebra;
use crate::pieces::PieceRelation;

/// The pre-order `g ≤ h` iff `h = vg` for some `v`, and its classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reachability {
    n: usize,
    le: Vec<bool>,
    class: Vec<usize>,
}

impl Reachability {
    /// Whether `h` is reachable from `g`.
    pub fn reaches(&self, g: usize, h: usize) -> bool {
        self.le[g * self.n + h]
    }

    pub fn equivalent(&self, g: usize, h: usize) -> bool {
        self.class[g] == self.class[h]
    }

    /// Class index of each type, numbered by smallest member.
    pub fn class_of(&self, h: usize) -> usize {
        self.class[h]
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let count = self.class.iter().max().map_or(0, |m| m + 1);
        let mut out = vec![Vec::new(); count];
        for (h, &c) in self.class.iter().enumerate() {
            out[c].push(h);
        }
        out
    }
}

pub fn reachability_classes(alg: &ForestAlgebra) -> Reachability {
    let n = alg.h_len();
    let mut le = vec![false; n * n];
    for v in alg.v().elements() {
        for g in alg.h().elements() {
            le[g * n + alg.act(v, g)] = true;
        }
    }
    let mut class = vec![usize::MAX; n];
    let mut next = 0;
    for g in 0..n {
        if class[g] == usize::MAX {
            for h in g..n {
                if le[g * n + h] && le[h * n + g] {
                    class[h] = next;
                }
            }
            next += 1;
        }
    }
    Reachability { n, le, class }
}

/// Types reachable from every type.
pub fn h_bottom(alg: &ForestAlgebra, reach: &Reachability) -> Vec<usize> {
    let bottom: Vec<usize> = alg
        .h()
        .elements()
        .filter(|&h| alg.h().elements().all(|g| reach.reaches(g, h)))
        .collect();
    let all = alg.h().product(alg.h().elements());
    assert!(
        bottom.contains(&all),
        "the sum of all types must be reachable from every type"
    );
    bottom
}

/// `{v : vh ∼ h}`.
pub fn stabilizer(alg: &ForestAlgebra, reach: &Reachability, h: usize) -> Vec<usize> {
    alg.v()
        .elements()
        .filter(|&v| reach.equivalent(alg.act(v, h), h))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LemmaViolation {
    /// `h ∼ h'` but their stabilizers differ.
    ClassDependence { h: usize, h2: usize },
    /// `v, w ∈ stab(h)` but `vw ∉ stab(h)`.
    NotSubmonoid { h: usize, v: usize, w: usize },
    /// `w ⪯ v ∈ stab(h)` but `w ∉ stab(h)`.
    NotPieceClosed { h: usize, v: usize, w: usize },
    /// `g, g' ⪯ h` but `g + g' ⋠ h`.
    SumNotPiece { h: usize, g: usize, g2: usize },
    /// `v ∈ stab(h)`, `g ⪯ h`, but `vg ⋠ h`.
    ActionNotPiece { h: usize, v: usize, g: usize },
    /// `g ⪯ h` but `g+□` or `□+g` does not stabilize `h`.
    InsertionNotStable { h: usize, g: usize },
}

impl fmt::Display for LemmaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Stabilizers depend only on the `∼`-class and are submonoids.
pub fn check_stabilizer_classes(alg: &ForestAlgebra) -> Vec<LemmaViolation> {
    let reach = reachability_classes(alg);
    let stabs: Vec<Vec<usize>> = alg
        .h()
        .elements()
        .map(|h| stabilizer(alg, &reach, h))
        .collect();
    let mut out = Vec::new();
    for h in alg.h().elements() {
        for h2 in h + 1..alg.h_len() {
            if reach.equivalent(h, h2) && stabs[h] != stabs[h2] {
                out.push(LemmaViolation::ClassDependence { h, h2 });
            }
        }
        let member = membership(alg.v_len(), &stabs[h]);
        if !member[alg.hole()] {
            out.push(LemmaViolation::NotSubmonoid {
                h,
                v: alg.hole(),
                w: alg.hole(),
            });
        }
        'pairs: for &v in &stabs[h] {
            for &w in &stabs[h] {
                if !member[alg.compose(v, w)] {
                    out.push(LemmaViolation::NotSubmonoid { h, v, w });
                    break 'pairs;
                }
            }
        }
    }
    out
}

/// Stabilizers are closed under pieces.
pub fn check_stabilizer_piece_closure(
    alg: &ForestAlgebra,
    rel: &PieceRelation,
) -> Vec<LemmaViolation> {
    let reach = reachability_classes(alg);
    let mut out = Vec::new();
    for h in alg.h().elements() {
        let stab = stabilizer(alg, &reach, h);
        let member = membership(alg.v_len(), &stab);
        if let Some((w, v)) = rel
            .v_pairs()
            .into_iter()
            .find(|&(w, v)| member[v] && !member[w])
        {
            out.push(LemmaViolation::NotPieceClosed { h, v, w });
        }
    }
    out
}

/// For `h ∉ H⊥` with `h + h ∼ h`, the pieces `G` of `h` and `stab(h)` form
/// a forest algebra: `G + G ⊆ G`, `stab(h)·G ⊆ G`, and `G+□, □+G ⊆ stab(h)`.
///
/// Returns the violations and the number of types `h` the check applied to.
pub fn check_piece_subalgebra(
    alg: &ForestAlgebra,
    rel: &PieceRelation,
) -> (Vec<LemmaViolation>, usize) {
    let reach = reachability_classes(alg);
    let bottom = h_bottom(alg, &reach);
    let mut out = Vec::new();
    let mut applicable = 0;
    for h in alg.h().elements() {
        if bottom.contains(&h) || !reach.equivalent(alg.plus(h, h), h) {
            continue;
        }
        applicable += 1;
        let pieces = rel.pieces_below_h(h);
        let stab = stabilizer(alg, &reach, h);
        let in_stab = membership(alg.v_len(), &stab);
        if let Some((g, g2)) = pairs_of(&pieces).find(|&(g, g2)| !rel.h_le(alg.plus(g, g2), h)) {
            out.push(LemmaViolation::SumNotPiece { h, g, g2 });
        }
        if let Some((v, g)) = stab
            .iter()
            .flat_map(|&v| pieces.iter().map(move |&g| (v, g)))
            .find(|&(v, g)| !rel.h_le(alg.act(v, g), h))
        {
            out.push(LemmaViolation::ActionNotPiece { h, v, g });
        }
        if let Some(&g) = pieces
            .iter()
            .find(|&&g| !in_stab[alg.ins_left(g)] || !in_stab[alg.ins_right(g)])
        {
            out.push(LemmaViolation::InsertionNotStable { h, g });
        }
    }
    (out, applicable)
}

fn membership(n: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &x in set {
        m[x] = true;
    }
    m
}

fn pairs_of(xs: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    xs.iter()
        .flat_map(move |&a| xs.iter().map(move |&b| (a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_transition_algebra, AutomatonSpec, Recognizer};
    use crate::pieces::compute_pieces;

    fn rec(text: &str) -> Recognizer {
        let s: AutomatonSpec = serde_json::from_str(text).unwrap();
        build_transition_algebra(&s).unwrap()
    }

    const F1: &str = r#"{"alphabet":["a","b"],"H":["n","y"],"zero":"n",
        "plus":[["n","y"],["y","y"]],
        "delta":{"a":{"n":"y","y":"y"},"b":{"n":"n","y":"y"}},
        "accepting":["y"]}"#;

    #[test]
    fn f1_structure() {
        let r = rec(F1);
        let alg = r.algebra();
        let reach = reachability_classes(alg);
        assert_eq!(reach.classes(), vec![vec![0], vec![1]]);
        assert!(reach.reaches(0, 1) && !reach.reaches(1, 0));
        assert_eq!(h_bottom(alg, &reach), vec![1]);
        assert_eq!(stabilizer(alg, &reach, 1), vec![0, 1]);
        assert_eq!(stabilizer(alg, &reach, 0), vec![alg.hole()]);
    }

    #[test]
    fn trivial_algebra() {
        let r = rec(
            r#"{"alphabet":["a"],"H":["z"],"zero":"z","plus":[["z"]],"delta":{"a":{"z":"z"}},"accepting":["z"]}"#,
        );
        let alg = r.algebra();
        let reach = reachability_classes(alg);
        assert_eq!(reach.classes().len(), 1);
        assert_eq!(h_bottom(alg, &reach), vec![0]);
    }

    #[test]
    fn f1_lemmas_hold() {
        let r = rec(F1);
        let rel = compute_pieces(&r, false);
        assert!(check_stabilizer_classes(r.algebra()).is_empty());
        assert!(check_stabilizer_piece_closure(r.algebra(), &rel).is_empty());
        // n + n = n is not in H⊥, so the subalgebra check applies to it.
        let (violations, applicable) = check_piece_subalgebra(r.algebra(), &rel);
        assert!(violations.is_empty());
        assert_eq!(applicable, 1);
    }
}
