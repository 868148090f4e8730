//! Reachability restriction and the syntactic quotient of a recognizer.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::algebra::{FiniteMonoid, ForestAlgebra, Morphism, Recognizer};
use crate::term::Forest;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntacticError {
    #[error("the recognizer has unreachable forest or context types; restrict it first")]
    NotReachableRestricted,
}

/// A recognizer cut down to its reachable part, with the element maps from
/// the original algebra (`None` for dropped elements).
#[derive(Clone, Debug)]
pub struct Restriction {
    pub recognizer: Recognizer,
    pub h_map: Vec<Option<usize>>,
    pub v_map: Vec<Option<usize>>,
}

/// Keeps the forest types reachable from `0` under `+` and letter actions,
/// and the context types generated by letters and insertions of those.
pub fn restrict_reachable(rec: &Recognizer) -> Restriction {
    let alg = rec.algebra();
    let letters = rec.morphism().letter_images();

    let mut reached = vec![false; alg.h_len()];
    reached[alg.zero()] = true;
    let mut stack = vec![alg.zero()];
    while let Some(g) = stack.pop() {
        let mut next: Vec<usize> = letters.iter().map(|&v| alg.act(v, g)).collect();
        for h in alg.h().elements().filter(|&h| reached[h]) {
            next.push(alg.plus(g, h));
            next.push(alg.plus(h, g));
        }
        for x in next {
            if !reached[x] {
                reached[x] = true;
                stack.push(x);
            }
        }
    }
    let h_kept: Vec<usize> = alg.h().elements().filter(|&h| reached[h]).collect();
    let mut h_map = vec![None; alg.h_len()];
    for (i, &h) in h_kept.iter().enumerate() {
        h_map[h] = Some(i);
    }

    let mut generators: Vec<usize> = letters.to_vec();
    generators.extend(h_kept.iter().map(|&g| alg.ins_left(g)));
    generators.extend(h_kept.iter().map(|&g| alg.ins_right(g)));
    let mut v_map = vec![None; alg.v_len()];
    let mut v_kept = vec![alg.hole()];
    v_map[alg.hole()] = Some(0);
    let mut queue = VecDeque::from([alg.hole()]);
    while let Some(x) = queue.pop_front() {
        for &g in &generators {
            let y = alg.compose(x, g);
            if v_map[y].is_none() {
                v_map[y] = Some(v_kept.len());
                v_kept.push(y);
                queue.push_back(y);
            }
        }
    }

    let nh = h_kept.len();
    let hm = |x: usize| h_map[x].expect("closed under the algebra operations");
    let vm = |x: usize| v_map[x].expect("closed under composition");
    let h_table = h_kept
        .iter()
        .flat_map(|&g| h_kept.iter().map(move |&h| (g, h)))
        .map(|(g, h)| hm(alg.plus(g, h)))
        .collect();
    let h = FiniteMonoid::from_table_unchecked(
        h_kept.iter().map(|&x| alg.h_name(x).to_string()).collect(),
        h_table,
        hm(alg.zero()),
    );
    let v_table = v_kept
        .iter()
        .flat_map(|&x| v_kept.iter().map(move |&y| (x, y)))
        .map(|(x, y)| vm(alg.compose(x, y)))
        .collect();
    let v = FiniteMonoid::from_table_unchecked(
        v_kept.iter().map(|&x| alg.v_name(x).to_string()).collect(),
        v_table,
        0,
    );
    let action = v_kept
        .iter()
        .flat_map(|&x| h_kept.iter().map(move |&g| hm(alg.act(x, g))))
        .collect::<Vec<_>>();
    debug_assert_eq!(action.len(), nh * v_kept.len());
    let algebra = ForestAlgebra::from_flat(
        h,
        v,
        action,
        h_kept.iter().map(|&g| vm(alg.ins_left(g))).collect(),
        h_kept.iter().map(|&g| vm(alg.ins_right(g))).collect(),
    );
    let morphism = Morphism::new(
        rec.alphabet().clone(),
        letters.iter().map(|&x| vm(x)).collect(),
    );
    let accepting = h_kept.iter().map(|&g| rec.is_accepting(g)).collect();
    Restriction {
        recognizer: Recognizer::new(algebra, morphism, accepting),
        h_map,
        v_map,
    }
}

pub fn is_reachable_restricted(rec: &Recognizer) -> bool {
    let r = restrict_reachable(rec);
    r.recognizer.algebra().h_len() == rec.algebra().h_len()
        && r.recognizer.algebra().v_len() == rec.algebra().v_len()
}

/// The syntactic forest algebra of a recognized language, with the quotient
/// maps from the recognizing algebra.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    pub h_class: Vec<usize>,
    pub v_class: Vec<usize>,
    pub quotient: Recognizer,
}

impl QuotientMap {
    pub fn member(&self, t: &Forest) -> Result<bool, crate::algebra::AlgebraError> {
        self.quotient.member(t)
    }
}

/// Numbers the classes of `signature` by their smallest member.
fn classes<K: std::hash::Hash + Eq>(
    n: usize,
    signature: impl Fn(usize) -> K,
) -> (Vec<usize>, Vec<usize>) {
    let mut seen: HashMap<K, usize> = HashMap::new();
    let mut class = Vec::with_capacity(n);
    let mut reps = Vec::new();
    for x in 0..n {
        let next = seen.len();
        let c = *seen.entry(signature(x)).or_insert(next);
        if c == reps.len() {
            reps.push(x);
        }
        class.push(c);
    }
    (class, reps)
}

/// Quotients by `h ≈ h'` iff `vh ∈ X ⇔ vh' ∈ X` for every context type `v`,
/// and `v ≈ v'` iff `vh ≈ v'h` for every `h`.
///
/// Only sound when every context type is realized, hence the reachability
/// precondition.
pub fn syntactic_quotient(rec: &Recognizer) -> Result<QuotientMap, SyntacticError> {
    if !is_reachable_restricted(rec) {
        return Err(SyntacticError::NotReachableRestricted);
    }
    let alg = rec.algebra();
    let (h_class, h_reps) = classes(alg.h_len(), |h| {
        alg.v()
            .elements()
            .map(|v| rec.is_accepting(alg.act(v, h)))
            .collect::<Vec<bool>>()
    });
    let (v_class, v_reps) = classes(alg.v_len(), |v| {
        alg.h()
            .elements()
            .map(|h| h_class[alg.act(v, h)])
            .collect::<Vec<usize>>()
    });

    let (nh, nv) = (h_reps.len(), v_reps.len());
    let mut plus = vec![usize::MAX; nh * nh];
    for g in alg.h().elements() {
        for h in alg.h().elements() {
            let slot = &mut plus[h_class[g] * nh + h_class[h]];
            let value = h_class[alg.plus(g, h)];
            assert!(
                *slot == usize::MAX || *slot == value,
                "forest congruence violated"
            );
            *slot = value;
        }
    }
    let mut compose = vec![usize::MAX; nv * nv];
    for v in alg.v().elements() {
        for w in alg.v().elements() {
            let slot = &mut compose[v_class[v] * nv + v_class[w]];
            let value = v_class[alg.compose(v, w)];
            assert!(
                *slot == usize::MAX || *slot == value,
                "context congruence violated"
            );
            *slot = value;
        }
    }
    let mut action = vec![usize::MAX; nv * nh];
    for v in alg.v().elements() {
        for h in alg.h().elements() {
            let slot = &mut action[v_class[v] * nh + h_class[h]];
            let value = h_class[alg.act(v, h)];
            assert!(
                *slot == usize::MAX || *slot == value,
                "action not compatible"
            );
            *slot = value;
        }
    }
    for x in 0..nv {
        for y in x + 1..nv {
            assert!(
                action[x * nh..(x + 1) * nh] != action[y * nh..(y + 1) * nh],
                "quotient lost faithfulness"
            );
        }
    }

    let h = FiniteMonoid::from_table_unchecked(
        h_reps.iter().map(|&g| alg.h_name(g).to_string()).collect(),
        plus,
        h_class[alg.zero()],
    );
    let v = FiniteMonoid::from_table_unchecked(
        (0..nv).map(|i| format!("v{i}")).collect(),
        compose,
        v_class[alg.hole()],
    );
    let algebra = ForestAlgebra::from_flat(
        h,
        v,
        action,
        h_reps.iter().map(|&g| v_class[alg.ins_left(g)]).collect(),
        h_reps.iter().map(|&g| v_class[alg.ins_right(g)]).collect(),
    );
    let morphism = Morphism::new(
        rec.alphabet().clone(),
        rec.morphism()
            .letter_images()
            .iter()
            .map(|&x| v_class[x])
            .collect(),
    );
    let accepting: Vec<bool> = h_reps.iter().map(|&g| rec.is_accepting(g)).collect();
    for g in alg.h().elements() {
        assert_eq!(
            rec.is_accepting(g),
            accepting[h_class[g]],
            "accepting set not saturated"
        );
    }
    Ok(QuotientMap {
        h_class,
        v_class,
        quotient: Recognizer::new(algebra, morphism, accepting),
    })
}

/// Restricts to the reachable part, then quotients.
pub fn minimize(rec: &Recognizer) -> Recognizer {
    let restricted = restrict_reachable(rec).recognizer;
    syntactic_quotient(&restricted)
        .expect("restricted recognizer")
        .quotient
}
