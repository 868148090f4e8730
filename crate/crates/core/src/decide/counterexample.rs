//! Concrete counterexamples: forests `r p^{2n} s` and `r p^n q p^n s`, with
//! `q` a piece of `p`, that the language separates.

use crate::algebra::Recognizer;
use crate::pieces::PairRealizer;
use crate::term::{is_piece_term, Context, Forest, Term};

use super::Analysis;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    /// Largest `n` tried.
    pub max_n: usize,
    /// Largest `r` and `s`, in nodes.
    pub max_nodes: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_n: 3,
            max_nodes: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lifted {
    pub r: Context,
    pub p: Context,
    pub q: Context,
    pub s: Forest,
    pub n: usize,
    /// Membership of `r p^{2n} s`.
    pub doubled_member: bool,
    /// Membership of `r p^n q p^n s`.
    pub replaced_member: bool,
}

impl Lifted {
    pub fn doubled(&self) -> Forest {
        self.r.compose(&self.p.power(2 * self.n)).apply(&self.s)
    }

    pub fn replaced(&self) -> Forest {
        let pn = self.p.power(self.n);
        self.r
            .compose(&pn)
            .compose(&self.q)
            .compose(&pn)
            .apply(&self.s)
    }

    pub fn total_nodes(&self) -> usize {
        self.replaced()
            .node_count()
            .max(self.doubled().node_count())
    }

    /// Re-evaluates both forests and checks that `q` is a piece of `p`.
    pub fn recheck(&self, rec: &Recognizer) -> bool {
        let piece = is_piece_term(
            &Term::Context(self.q.clone()),
            &Term::Context(self.p.clone()),
        )
        .unwrap_or(false);
        let left = rec.member(&self.doubled());
        let right = rec.member(&self.replaced());
        piece
            && left == Ok(self.doubled_member)
            && right == Ok(self.replaced_member)
            && self.doubled_member != self.replaced_member
    }
}

/// One representative per type with a term of at most `max_nodes` nodes,
/// ordered by size and then by rendered text.
fn representatives<T: Clone + ToString>(
    terms: impl Iterator<Item = (usize, T)>,
    max_nodes: usize,
    size: impl Fn(&T) -> usize,
) -> Vec<(usize, T)> {
    let mut reps: Vec<(usize, T)> = terms.filter(|(_, t)| size(t) <= max_nodes).collect();
    reps.sort_by_cached_key(|(_, t)| (size(t), t.to_string()));
    reps
}

fn search(analysis: &Analysis, p: &Context, q: &Context, bounds: SearchBounds) -> Option<Lifted> {
    let rec = &analysis.recognizer;
    let alg = rec.algebra();
    let tp = rec.eval_context(p).ok()?;
    let tq = rec.eval_context(q).ok()?;
    let contexts = representatives(
        alg.v()
            .elements()
            .filter_map(|v| analysis.witnesses.context(v).ok().map(|c| (v, c.clone()))),
        bounds.max_nodes,
        Context::node_count,
    );
    let forests = representatives(
        alg.h()
            .elements()
            .filter_map(|h| analysis.witnesses.forest(h).ok().map(|f| (h, f.clone()))),
        bounds.max_nodes,
        Forest::node_count,
    );
    for n in 1..=bounds.max_n {
        let pn = alg.v().power(tp, n);
        let doubled = alg.compose(pn, pn);
        let replaced = alg.compose(alg.compose(pn, tq), pn);
        for (vr, r) in &contexts {
            let (left, right) = (alg.compose(*vr, doubled), alg.compose(*vr, replaced));
            for (hs, s) in &forests {
                let (a, b) = (
                    rec.is_accepting(alg.act(left, *hs)),
                    rec.is_accepting(alg.act(right, *hs)),
                );
                if a != b {
                    let lifted = Lifted {
                        r: r.clone(),
                        p: p.clone(),
                        q: q.clone(),
                        s: s.clone(),
                        n,
                        doubled_member: a,
                        replaced_member: b,
                    };
                    assert!(
                        lifted.recheck(rec),
                        "type-level search disagrees with term evaluation"
                    );
                    return Some(lifted);
                }
            }
        }
    }
    None
}

/// Searches for a counterexample built from the witness `(v, w)`.
///
/// `p` and `q` are the witness terms of `v` and `w` when `q` is a piece of
/// `p`; otherwise a smallest realizing pair `q ⪯ p` is used. `None` means
/// the bounded search was inconclusive.
pub fn semantic_counterexample(
    analysis: &Analysis,
    v: usize,
    w: usize,
    bounds: SearchBounds,
) -> Option<Lifted> {
    let p = analysis.witnesses.context(v).ok()?.clone();
    let q = analysis.witnesses.context(w).ok()?.clone();
    let is_piece =
        is_piece_term(&Term::Context(q.clone()), &Term::Context(p.clone())).unwrap_or(false);
    if is_piece {
        return search(analysis, &p, &q, bounds);
    }
    let realizer = PairRealizer::build(&analysis.recognizer);
    let pair = realizer.context_pair(w, v)?;
    search(analysis, &pair.whole, &pair.piece, bounds)
}

/// Tries every piece pair `w ⪯ v` of the algebra, in canonical order.
pub fn exhaustive_search(
    analysis: &Analysis,
    bounds: SearchBounds,
) -> Option<(usize, usize, Lifted)> {
    let realizer = PairRealizer::build(&analysis.recognizer);
    let mut pairs = analysis.pieces.v_pairs();
    pairs.sort_by_key(|&(w, v)| (v, w));
    for (w, v) in pairs {
        let Some(pair) = realizer.context_pair(w, v) else {
            continue;
        };
        if let Some(lifted) = search(analysis, &pair.whole, &pair.piece, bounds) {
            return Some((v, w, lifted));
        }
    }
    None
}
