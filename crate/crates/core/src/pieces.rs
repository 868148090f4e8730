//! The piece relation on forest and context types, and concrete terms
//! realizing algebra elements and piece pairs.
//!
//! A pair `(x, y)` in either relation means `x ⪯ y`: `x` is the type of a
//! piece of some term of type `y`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use thiserror::Error;

use crate::algebra::{ForestAlgebra, Recognizer};
use crate::term::{Context, Forest};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PieceError {
    #[error("element {0} is not the image of any term")]
    ElementUnrealized(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceRelation {
    nv: usize,
    nh: usize,
    pv: Vec<bool>,
    ph: Vec<bool>,
    rounds: usize,
}

impl PieceRelation {
    /// `w ⪯ v` on context types.
    pub fn v_le(&self, w: usize, v: usize) -> bool {
        self.pv[w * self.nv + v]
    }

    /// `g ⪯ h` on forest types.
    pub fn h_le(&self, g: usize, h: usize) -> bool {
        self.ph[g * self.nh + h]
    }

    /// All `(w, v)` with `w ⪯ v`, sorted.
    pub fn v_pairs(&self) -> Vec<(usize, usize)> {
        pairs(&self.pv, self.nv)
    }

    pub fn h_pairs(&self) -> Vec<(usize, usize)> {
        pairs(&self.ph, self.nh)
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn is_transitive(&self) -> bool {
        transitive_violation(&self.pv, self.nv).is_none()
            && transitive_violation(&self.ph, self.nh).is_none()
    }

    /// The context types that are pieces of `v`.
    pub fn pieces_below_v(&self, v: usize) -> Vec<usize> {
        (0..self.nv).filter(|&w| self.v_le(w, v)).collect()
    }

    pub fn pieces_below_h(&self, h: usize) -> Vec<usize> {
        (0..self.nh).filter(|&g| self.h_le(g, h)).collect()
    }
}

fn pairs(rel: &[bool], n: usize) -> Vec<(usize, usize)> {
    (0..n * n)
        .filter(|&i| rel[i])
        .map(|i| (i / n, i % n))
        .collect()
}

fn transitive_violation(rel: &[bool], n: usize) -> Option<(usize, usize, usize)> {
    for x in 0..n {
        for y in 0..n {
            if !rel[x * n + y] {
                continue;
            }
            for z in 0..n {
                if rel[y * n + z] && !rel[x * n + z] {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

fn transitive_closure(rel: &mut [bool], n: usize) {
    for k in 0..n {
        for i in 0..n {
            if rel[i * n + k] {
                for j in 0..n {
                    if rel[k * n + j] {
                        rel[i * n + j] = true;
                    }
                }
            }
        }
    }
}

/// Least fixpoint of the piece rules:
///
/// * `(□,□)`, and `(a□, a□)`, `(□, a□)` for every letter;
/// * `(g+□, h+□)` and `(□+g, □+h)` whenever `g ⪯ h`;
/// * closure under pointwise composition;
/// * `g ⪯ h` for `(v, w)` in the context relation with `g = v0`, `h = w0`.
///
/// With `transitive`, each round also closes both relations transitively.
pub fn compute_pieces(rec: &Recognizer, transitive: bool) -> PieceRelation {
    let alg = rec.algebra();
    let (nv, nh) = (alg.v_len(), alg.h_len());
    let hole = alg.hole();
    let mut pv = vec![false; nv * nv];
    let mut ph = vec![false; nh * nh];
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut gens: Vec<(usize, usize)> = Vec::new();
        for &va in rec.morphism().letter_images() {
            gens.push((va, va));
            gens.push((hole, va));
        }
        for (g, h) in pairs(&ph, nh) {
            gens.push((alg.ins_left(g), alg.ins_left(h)));
            gens.push((alg.ins_right(g), alg.ins_right(h)));
        }
        if transitive {
            gens.extend(pairs(&pv, nv));
        }
        gens.sort_unstable();
        gens.dedup();

        let mut next = vec![false; nv * nv];
        next[hole * nv + hole] = true;
        let mut queue = VecDeque::from([(hole, hole)]);
        while let Some((x, y)) = queue.pop_front() {
            for &(g, h) in &gens {
                let (x2, y2) = (alg.compose(x, g), alg.compose(y, h));
                if !next[x2 * nv + y2] {
                    next[x2 * nv + y2] = true;
                    queue.push_back((x2, y2));
                }
            }
        }
        if transitive {
            transitive_closure(&mut next, nv);
        }
        let mut next_h = vec![false; nh * nh];
        for (v, w) in pairs(&next, nv) {
            next_h[alg.act(v, alg.zero()) * nh + alg.act(w, alg.zero())] = true;
        }
        if transitive {
            transitive_closure(&mut next_h, nh);
        }
        debug_assert!(
            pv.iter().zip(&next).all(|(a, b)| !a || *b),
            "relation shrank"
        );
        let done = next == pv && next_h == ph;
        pv = next;
        ph = next_h;
        log::debug!(
            "piece round {rounds}: {} context pairs",
            pv.iter().filter(|&&b| b).count()
        );
        if done {
            break;
        }
        assert!(
            rounds <= nv * nv + nh * nh + 1,
            "piece fixpoint did not converge"
        );
    }
    PieceRelation {
        nv,
        nh,
        pv,
        ph,
        rounds,
    }
}

/// Whether `X ⊆ H` is closed under taking pieces; otherwise the first
/// `(g, h)` with `g ⪯ h`, `h ∈ X`, `g ∉ X`.
pub fn is_downward_closed(rel: &PieceRelation, x: &[bool]) -> Result<(), (usize, usize)> {
    match rel.h_pairs().into_iter().find(|&(g, h)| x[h] && !x[g]) {
        Some(pair) => Err(pair),
        None => Ok(()),
    }
}

/// Generators of the context monoid in their fixed order: letters, then
/// `h+□` for `h ∈ H`, then `□+h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Generator {
    Letter(usize),
    InsLeft(usize),
    InsRight(usize),
}

impl Generator {
    fn rank(self, nh: usize) -> usize {
        match self {
            Generator::Letter(a) => a,
            Generator::InsLeft(h) => 1_000_000 + h,
            Generator::InsRight(h) => 1_000_000 + nh + h,
        }
    }
}

/// A shortest term for every forest and context type.
///
/// Found by a shortest-path search over generator products, by node count;
/// ties go to the product whose prefix was settled first, then to the
/// earlier generator (letters, then `h+□`, then `□+h`).
#[derive(Clone, Debug)]
pub struct WitnessTable {
    contexts: Vec<Option<Context>>,
    forests: Vec<Option<Forest>>,
}

impl WitnessTable {
    pub fn build(rec: &Recognizer) -> Self {
        let alg = rec.algebra();
        let (nv, nh) = (alg.v_len(), alg.h_len());
        let letters = rec.alphabet().letters();
        let mut contexts: Vec<Option<Context>> = vec![None; nv];
        let mut forests: Vec<Option<Forest>> = vec![None; nh];
        let mut cost = vec![usize::MAX; nv];
        let mut settled: Vec<usize> = Vec::new();
        // (cost, settle rank of prefix, generator rank) -> (target, prefix, generator)
        type Key = (usize, usize, usize);
        let mut heap: BinaryHeap<Reverse<(Key, usize, usize, Generator)>> = BinaryHeap::new();
        let mut gens: Vec<(Generator, usize, usize)> = letters
            .iter()
            .enumerate()
            .map(|(i, _)| (Generator::Letter(i), rec.morphism().letter_image(i), 1))
            .collect();
        let mut best: Vec<Option<Key>> = vec![None; nv];

        contexts[alg.hole()] = Some(Context::hole());
        cost[alg.hole()] = 0;
        let mut done = vec![false; nv];
        let mut frontier = vec![alg.hole()];
        loop {
            // Settle everything queued for processing, adding new generators as
            // forest types acquire witnesses.
            for v in frontier.drain(..) {
                done[v] = true;
                let rank = settled.len();
                settled.push(v);
                let h = alg.act(v, alg.zero());
                if forests[h].is_none() {
                    let f = contexts[v].as_ref().unwrap().apply(&Forest::empty());
                    if h != alg.zero() {
                        let size = f.node_count();
                        let new = [
                            (Generator::InsLeft(h), alg.ins_left(h), size),
                            (Generator::InsRight(h), alg.ins_right(h), size),
                        ];
                        for &(g, target, c) in &new {
                            for (r, &x) in settled.iter().enumerate() {
                                push(
                                    &mut heap,
                                    &mut best,
                                    &done,
                                    alg,
                                    x,
                                    r,
                                    cost[x] + c,
                                    g,
                                    target,
                                    nh,
                                );
                            }
                        }
                        gens.extend(new);
                    }
                    forests[h] = Some(f);
                }
                for &(g, target, c) in &gens {
                    push(
                        &mut heap,
                        &mut best,
                        &done,
                        alg,
                        v,
                        rank,
                        cost[v] + c,
                        g,
                        target,
                        nh,
                    );
                }
            }
            let Some(Reverse((key, v, prefix, g))) = heap.pop() else {
                break;
            };
            if done[v] || best[v] != Some(key) {
                continue;
            }
            let gen_ctx = match g {
                Generator::Letter(a) => Context::letter(&letters[a]),
                Generator::InsLeft(h) => Context::insert_left(forests[h].as_ref().unwrap()),
                Generator::InsRight(h) => Context::insert_right(forests[h].as_ref().unwrap()),
            };
            contexts[v] = Some(contexts[prefix].as_ref().unwrap().compose(&gen_ctx));
            cost[v] = key.0;
            frontier.push(v);
        }
        WitnessTable { contexts, forests }
    }

    pub fn context(&self, v: usize) -> Result<&Context, PieceError> {
        self.contexts[v]
            .as_ref()
            .ok_or(PieceError::ElementUnrealized(v))
    }

    pub fn forest(&self, h: usize) -> Result<&Forest, PieceError> {
        self.forests[h]
            .as_ref()
            .ok_or(PieceError::ElementUnrealized(h))
    }
}

#[allow(clippy::too_many_arguments)]
fn push(
    heap: &mut BinaryHeap<Reverse<((usize, usize, usize), usize, usize, Generator)>>,
    best: &mut [Option<(usize, usize, usize)>],
    done: &[bool],
    alg: &ForestAlgebra,
    prefix: usize,
    rank: usize,
    cost: usize,
    g: Generator,
    gen_elem: usize,
    nh: usize,
) {
    let target = alg.compose(prefix, gen_elem);
    if done[target] {
        return;
    }
    let key = (cost, rank, g.rank(nh));
    if best[target].is_none_or(|b| key < b) {
        best[target] = Some(key);
        heap.push(Reverse((key, target, prefix, g)));
    }
}

/// Concrete terms `p ⪯ q` realizing a pair of types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairRealization<T> {
    pub piece: T,
    pub whole: T,
}

/// Realizations of every pair of context types that some term pair `p ⪯ q`
/// maps to, each with `q` as small as possible.
///
/// Built independently of [`compute_pieces`], by a shortest-path search
/// over products of generator pairs; its pair set is therefore a cross-check
/// of the fixpoint.
#[derive(Clone, Debug)]
pub struct PairRealizer {
    nv: usize,
    nh: usize,
    contexts: Vec<Option<PairRealization<Context>>>,
    forests: Vec<Option<PairRealization<Forest>>>,
}

impl PairRealizer {
    pub fn build(rec: &Recognizer) -> Self {
        let alg = rec.algebra();
        let (nv, nh) = (alg.v_len(), alg.h_len());
        let letters = rec.alphabet().letters();
        let idx = |x: usize, y: usize| x * nv + y;

        #[derive(Clone)]
        struct Gen {
            elems: (usize, usize),
            cost: usize,
            terms: (Context, Context),
        }
        let mut gens: Vec<Gen> = Vec::new();
        for (i, a) in letters.iter().enumerate() {
            let va = rec.morphism().letter_image(i);
            gens.push(Gen {
                elems: (va, va),
                cost: 1,
                terms: (Context::letter(a), Context::letter(a)),
            });
            gens.push(Gen {
                elems: (alg.hole(), va),
                cost: 1,
                terms: (Context::hole(), Context::letter(a)),
            });
        }

        let mut contexts: Vec<Option<PairRealization<Context>>> = vec![None; nv * nv];
        let mut forests: Vec<Option<PairRealization<Forest>>> = vec![None; nh * nh];
        let mut cost = vec![usize::MAX; nv * nv];
        let mut done = vec![false; nv * nv];
        let mut settled: Vec<(usize, usize)> = Vec::new();
        let mut best: Vec<Option<(usize, usize, usize)>> = vec![None; nv * nv];
        let mut heap: BinaryHeap<Reverse<((usize, usize, usize), usize, usize)>> =
            BinaryHeap::new();

        let start = (alg.hole(), alg.hole());
        contexts[idx(start.0, start.1)] = Some(PairRealization {
            piece: Context::hole(),
            whole: Context::hole(),
        });
        cost[idx(start.0, start.1)] = 0;
        let mut frontier = vec![start];

        let relax = |heap: &mut BinaryHeap<_>,
                     best: &mut Vec<Option<(usize, usize, usize)>>,
                     done: &Vec<bool>,
                     from: (usize, usize),
                     rank: usize,
                     base: usize,
                     gi: usize,
                     g: &Gen| {
            let to = (
                alg.compose(from.0, g.elems.0),
                alg.compose(from.1, g.elems.1),
            );
            let t = idx(to.0, to.1);
            if done[t] {
                return;
            }
            let key = (base + g.cost, rank, gi);
            if best[t].is_none_or(|b| key < b) {
                best[t] = Some(key);
                heap.push(Reverse((key, t, idx(from.0, from.1))));
            }
        };

        loop {
            for p in frontier.drain(..) {
                let pi = idx(p.0, p.1);
                done[pi] = true;
                let rank = settled.len();
                settled.push(p);
                let real = contexts[pi].clone().unwrap();
                let (g, h) = (alg.act(p.0, alg.zero()), alg.act(p.1, alg.zero()));
                if forests[g * nh + h].is_none() {
                    let pair = PairRealization {
                        piece: real.piece.apply(&Forest::empty()),
                        whole: real.whole.apply(&Forest::empty()),
                    };
                    let size = pair.whole.node_count();
                    if size > 0 {
                        let new = [
                            Gen {
                                elems: (alg.ins_left(g), alg.ins_left(h)),
                                cost: size,
                                terms: (
                                    Context::insert_left(&pair.piece),
                                    Context::insert_left(&pair.whole),
                                ),
                            },
                            Gen {
                                elems: (alg.ins_right(g), alg.ins_right(h)),
                                cost: size,
                                terms: (
                                    Context::insert_right(&pair.piece),
                                    Context::insert_right(&pair.whole),
                                ),
                            },
                        ];
                        for (k, gen) in new.iter().enumerate() {
                            for (r, &x) in settled.iter().enumerate() {
                                relax(
                                    &mut heap,
                                    &mut best,
                                    &done,
                                    x,
                                    r,
                                    cost[idx(x.0, x.1)],
                                    gens.len() + k,
                                    gen,
                                );
                            }
                        }
                        gens.extend(new);
                    }
                    forests[g * nh + h] = Some(pair);
                }
                for (gi, gen) in gens.iter().enumerate() {
                    relax(&mut heap, &mut best, &done, p, rank, cost[pi], gi, gen);
                }
            }
            let Some(Reverse((key, t, from))) = heap.pop() else {
                break;
            };
            if done[t] || best[t] != Some(key) {
                continue;
            }
            let gen = &gens[key.2];
            let prefix = contexts[from].as_ref().unwrap();
            contexts[t] = Some(PairRealization {
                piece: prefix.piece.compose(&gen.terms.0),
                whole: prefix.whole.compose(&gen.terms.1),
            });
            cost[t] = key.0;
            frontier.push((t / nv, t % nv));
        }
        PairRealizer {
            nv,
            nh,
            contexts,
            forests,
        }
    }

    pub fn context_pair(&self, w: usize, v: usize) -> Option<&PairRealization<Context>> {
        self.contexts[w * self.nv + v].as_ref()
    }

    pub fn forest_pair(&self, g: usize, h: usize) -> Option<&PairRealization<Forest>> {
        self.forests[g * self.nh + h].as_ref()
    }

    pub fn realized_context_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.nv * self.nv)
            .filter(|&i| self.contexts[i].is_some())
            .map(|i| (i / self.nv, i % self.nv))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_transition_algebra, AutomatonSpec};
    use crate::term::{is_piece_term, Term};

    fn rec(text: &str) -> Recognizer {
        let s: AutomatonSpec = serde_json::from_str(text).unwrap();
        build_transition_algebra(&s).unwrap()
    }

    const F1: &str = r#"{"alphabet":["a","b"],"H":["n","y"],"zero":"n",
        "plus":[["n","y"],["y","y"]],
        "delta":{"a":{"n":"y","y":"y"},"b":{"n":"n","y":"y"}},
        "accepting":["y"]}"#;

    #[test]
    fn f1_relation() {
        let r = rec(F1);
        let rel = compute_pieces(&r, false);
        let cy = r.morphism().letter_image(0);
        let id = r.algebra().hole();
        assert!(rel.v_le(id, cy));
        assert!(!rel.v_le(cy, id));
        assert!(rel.v_le(cy, cy) && rel.v_le(id, id));
        assert!(rel.h_le(0, 1) && !rel.h_le(1, 0));
        assert_eq!(is_downward_closed(&rel, &[false, true]), Err((0, 1)));
        assert_eq!(is_downward_closed(&rel, &[true, false]), Ok(()));
        assert_eq!(is_downward_closed(&rel, &[true, true]), Ok(()));
    }

    #[test]
    fn projection_law_and_zero_below_everything() {
        let r = rec(F1);
        let rel = compute_pieces(&r, false);
        let alg = r.algebra();
        let mut expected: Vec<(usize, usize)> = rel
            .v_pairs()
            .iter()
            .map(|&(v, w)| (alg.act(v, alg.zero()), alg.act(w, alg.zero())))
            .collect();
        expected.sort_unstable();
        expected.dedup();
        assert_eq!(rel.h_pairs(), expected);
        for h in alg.h().elements() {
            assert!(rel.h_le(alg.zero(), h));
        }
    }

    #[test]
    fn f1_witnesses() {
        let r = rec(F1);
        let w = WitnessTable::build(&r);
        assert_eq!(w.context(r.algebra().hole()).unwrap().to_string(), "[]");
        assert_eq!(
            w.context(r.morphism().letter_image(0)).unwrap().to_string(),
            "a([])"
        );
        assert_eq!(w.forest(1).unwrap().to_string(), "a");
        assert_eq!(w.forest(0).unwrap().to_string(), "0");
    }

    #[test]
    fn realizer_pairs_are_pieces() {
        let r = rec(F1);
        let rel = compute_pieces(&r, false);
        let pr = PairRealizer::build(&r);
        assert_eq!(pr.realized_context_pairs(), rel.v_pairs());
        for (w, v) in rel.v_pairs() {
            let pair = pr.context_pair(w, v).unwrap();
            assert_eq!(r.eval_context(&pair.piece).unwrap(), w);
            assert_eq!(r.eval_context(&pair.whole).unwrap(), v);
            assert!(is_piece_term(
                &Term::Context(pair.piece.clone()),
                &Term::Context(pair.whole.clone())
            )
            .unwrap());
        }
    }

    #[test]
    fn transitive_flag_only_adds() {
        let r = rec(F1);
        let plain = compute_pieces(&r, false);
        let trans = compute_pieces(&r, true);
        assert!(trans.is_transitive());
        for (w, v) in plain.v_pairs() {
            assert!(trans.v_le(w, v));
        }
    }
}
