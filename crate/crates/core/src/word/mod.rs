//! Words over finite monoids: Green's relations, the identity
//! `(mn)^ω m (mn)^ω = (mn)^ω`, stratified monoids, and synthesis of block
//! expressions for the preimages of a morphism.

mod context;
mod expr;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::algebra::FiniteMonoid;

pub use context::{
    context_factor_word, decompose_context_types, ContextDecomposition, FactorLetter,
};
pub use expr::{
    enumerate_words, first_disagreement, word_expr_member, Block, BlockExpr, SymbolSet, WordExpr,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("monoid violates (mn)^w m (mn)^w = (mn)^w at m={m}, n={n}")]
    NotDA { m: String, n: String },
    #[error("pre-order is not stratified: {n} below {m} but m^w n m^w != m^w")]
    NotStratified { m: String, n: String },
    #[error("pre-order table has the wrong shape")]
    PreShape,
    #[error("letter `{0}` is not in the alphabet")]
    UnknownLetter(String),
    #[error("unknown monoid element `{0}`")]
    UnknownElement(String),
    #[error("the algebra fails the identity at v={v}, w={w}")]
    IdentityFails { v: String, w: String },
    #[error("synthesis recursion revisited ({0}); the monoid is not DA")]
    Cycle(String),
}

/// The `∼R` and `∼L` classes, each numbered by smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreenClasses {
    pub r_class: Vec<usize>,
    pub l_class: Vec<usize>,
}

impl GreenClasses {
    pub fn r_related(&self, m: usize, n: usize) -> bool {
        self.r_class[m] == self.r_class[n]
    }

    pub fn l_related(&self, m: usize, n: usize) -> bool {
        self.l_class[m] == self.l_class[n]
    }

    pub fn r_classes(&self) -> Vec<Vec<usize>> {
        partition(&self.r_class)
    }

    pub fn l_classes(&self) -> Vec<Vec<usize>> {
        partition(&self.l_class)
    }
}

fn partition(class: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (x, &c) in class.iter().enumerate() {
        if c == out.len() {
            out.push(Vec::new());
        }
        out[c].push(x);
    }
    out
}

/// `right[m]` is the right ideal `mM` as a membership vector.
fn right_ideals(mon: &FiniteMonoid) -> Vec<Vec<bool>> {
    mon.elements()
        .map(|m| {
            let mut row = vec![false; mon.len()];
            for k in mon.elements() {
                row[mon.mul(m, k)] = true;
            }
            row
        })
        .collect()
}

fn classes_from(ideals: &[Vec<bool>]) -> Vec<usize> {
    let n = ideals.len();
    let mut class = vec![usize::MAX; n];
    let mut next = 0;
    for m in 0..n {
        if class[m] != usize::MAX {
            continue;
        }
        for x in m..n {
            if ideals[m][x] && ideals[x][m] {
                class[x] = next;
            }
        }
        next += 1;
    }
    class
}

pub fn green_classes(mon: &FiniteMonoid) -> GreenClasses {
    GreenClasses {
        r_class: classes_from(&right_ideals(mon)),
        l_class: classes_from(&right_ideals(&mon.opposite())),
    }
}

/// The first `(m, n)` with `(mn)^ω m (mn)^ω ≠ (mn)^ω`.
pub fn check_da(mon: &FiniteMonoid) -> Option<(usize, usize)> {
    for m in mon.elements() {
        for n in mon.elements() {
            let e = mon.omega(mon.mul(m, n));
            if mon.product([e, m, e]) != e {
                return Some((m, n));
            }
        }
    }
    None
}

/// `m ∼R n ∧ m ∼L n ⇒ m = n`; returns a violating pair.
pub fn check_wilke2(mon: &FiniteMonoid) -> Option<(usize, usize)> {
    let g = green_classes(mon);
    for m in mon.elements() {
        for n in m + 1..mon.len() {
            if g.r_related(m, n) && g.l_related(m, n) {
                return Some((m, n));
            }
        }
    }
    None
}

/// `m ∼R n ∼R mk ⇒ nk ∼R n`; returns a violating triple.
pub fn check_wilke1(mon: &FiniteMonoid) -> Option<(usize, usize, usize)> {
    let g = green_classes(mon);
    for m in mon.elements() {
        for n in mon.elements() {
            if !g.r_related(m, n) {
                continue;
            }
            for k in mon.elements() {
                if g.r_related(n, mon.mul(m, k)) && !g.r_related(mon.mul(n, k), n) {
                    return Some((m, n, k));
                }
            }
        }
    }
    None
}

/// A monoid with a pre-order such that `m^ω n m^ω = m^ω` whenever `n ⪯ m`.
#[derive(Clone, Debug)]
pub struct StratifiedMonoid {
    mon: FiniteMonoid,
    /// `pre[n][m]` iff `n ⪯ m`.
    pre: Vec<Vec<bool>>,
}

impl StratifiedMonoid {
    /// The equality pre-order.
    pub fn trivial(mon: FiniteMonoid) -> Self {
        let n = mon.len();
        let pre = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        StratifiedMonoid { mon, pre }
    }

    /// Takes the reflexive and transitive closure of `pre` and checks
    /// stratification on it.
    pub fn new(mon: FiniteMonoid, pre: Vec<Vec<bool>>) -> Result<Self, WordError> {
        let n = mon.len();
        if pre.len() != n || pre.iter().any(|row| row.len() != n) {
            return Err(WordError::PreShape);
        }
        let mut pre = pre;
        for (i, row) in pre.iter_mut().enumerate() {
            row[i] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if pre[i][k] {
                    for j in 0..n {
                        if pre[k][j] {
                            pre[i][j] = true;
                        }
                    }
                }
            }
        }
        for m in 0..n {
            let e = mon.omega(m);
            for x in 0..n {
                if pre[x][m] && mon.product([e, x, e]) != e {
                    return Err(WordError::NotStratified {
                        m: mon.name(m).to_string(),
                        n: mon.name(x).to_string(),
                    });
                }
            }
        }
        Ok(StratifiedMonoid { mon, pre })
    }

    pub fn monoid(&self) -> &FiniteMonoid {
        &self.mon
    }

    pub fn le(&self, n: usize, m: usize) -> bool {
        self.pre[n][m]
    }
}

/// A morphism from words over named letters into a stratified monoid.
#[derive(Clone, Debug)]
pub struct WordMorphism {
    pub letters: Vec<String>,
    pub images: Vec<usize>,
}

impl WordMorphism {
    pub fn new(letters: Vec<String>, images: Vec<usize>) -> Self {
        assert_eq!(letters.len(), images.len());
        WordMorphism { letters, images }
    }

    /// From a letter-to-element-name map.
    pub fn from_names(
        mon: &FiniteMonoid,
        map: &BTreeMap<String, String>,
    ) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        let mut images = Vec::new();
        for (a, m) in map {
            letters.push(a.clone());
            images.push(
                mon.index_of(m)
                    .ok_or_else(|| WordError::UnknownElement(m.clone()))?,
            );
        }
        Ok(WordMorphism { letters, images })
    }

    pub fn eval(&self, mon: &FiniteMonoid, word: &[usize]) -> usize {
        mon.product(word.iter().map(|&a| self.images[a]))
    }

    pub fn eval_names(&self, mon: &FiniteMonoid, word: &[&str]) -> Result<usize, WordError> {
        let mut acc = mon.identity();
        for l in word {
            let a = self
                .letters
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| WordError::UnknownLetter(l.to_string()))?;
            acc = mon.mul(acc, self.images[a]);
        }
        Ok(acc)
    }
}

/// Synthesis works on element-level letters: a word over the images of the
/// real letters. Keys are (alphabet of images, target).
struct Synth<'a> {
    mon: &'a FiniteMonoid,
    allowed: &'a dyn Fn(&SymbolSet) -> bool,
    opp: FiniteMonoid,
    green: GreenClasses,
    full: HashMap<(BTreeSet<usize>, usize), BlockExpr>,
    prefixes: HashMap<(BTreeSet<usize>, usize, bool), BlockExpr>,
    active: HashSet<(BTreeSet<usize>, usize)>,
}

impl<'a> Synth<'a> {
    fn new(mon: &'a FiniteMonoid, allowed: &'a dyn Fn(&SymbolSet) -> bool) -> Self {
        Synth {
            mon,
            allowed,
            opp: mon.opposite(),
            green: green_classes(mon),
            full: HashMap::new(),
            prefixes: HashMap::new(),
            active: HashSet::new(),
        }
    }

    fn mul(&self, flip: bool, a: usize, b: usize) -> usize {
        if flip {
            self.opp.mul(a, b)
        } else {
            self.mon.mul(a, b)
        }
    }

    /// `∼R` in the original monoid, `∼L` in the flipped one.
    fn related(&self, flip: bool, m: usize, n: usize) -> bool {
        if flip {
            self.green.l_related(m, n)
        } else {
            self.green.r_related(m, n)
        }
    }

    fn normalized(&self, s: &BTreeSet<usize>, e: &BlockExpr) -> BlockExpr {
        e.simplified().widened(s, self.allowed)
    }

    /// `{a ∈ s : m a ∼ m}`.
    fn stable_letters(&self, s: &BTreeSet<usize>, m: usize, flip: bool) -> BTreeSet<usize> {
        s.iter()
            .copied()
            .filter(|&a| self.related(flip, self.mul(flip, m, a), m))
            .collect()
    }

    /// Words over `s` evaluating to `m`.
    fn synth(&mut self, s: &BTreeSet<usize>, m: usize) -> Result<BlockExpr, WordError> {
        let key = (s.clone(), m);
        if let Some(e) = self.full.get(&key) {
            return Ok(e.clone());
        }
        if !self.active.insert(key.clone()) {
            return Err(WordError::Cycle(format!("{:?} -> {}", s, self.mon.name(m))));
        }
        let right = self.class_side(s, m, false)?;
        let left = self.class_side(s, m, true)?.reversed();
        let e = self.normalized(s, &right.intersect(&left));
        log::debug!("synth {:?} {}: {} blocks", s, self.mon.name(m), e.len());
        self.active.remove(&key);
        self.full.insert(key, e.clone());
        Ok(e)
    }

    /// Words whose value is `∼`-related to `m`: `⋃_{n ∼ m} V_n A_m*`. In the
    /// flipped orientation words are read backwards.
    fn class_side(
        &mut self,
        s: &BTreeSet<usize>,
        m: usize,
        flip: bool,
    ) -> Result<BlockExpr, WordError> {
        let tail = BlockExpr::star(self.stable_letters(s, m, flip));
        let mut out = BlockExpr::empty();
        for n in self.mon.elements() {
            if self.related(flip, n, m) {
                out = out.union(&self.prefix_minimal(s, n, flip)?.concat(&tail));
            }
        }
        Ok(self.normalized(s, &out))
    }

    /// `V_m`: words with value `m` whose longest proper prefix is not
    /// `∼`-related to `m`, by `V_m = ⋃ V_n U_{n,k} a`.
    fn prefix_minimal(
        &mut self,
        s: &BTreeSet<usize>,
        m: usize,
        flip: bool,
    ) -> Result<BlockExpr, WordError> {
        let key = (s.clone(), m, flip);
        if let Some(e) = self.prefixes.get(&key) {
            return Ok(e.clone());
        }
        let mut out = if m == self.mon.identity() {
            BlockExpr::epsilon()
        } else {
            BlockExpr::empty()
        };
        for k in self.mon.elements() {
            if self.related(flip, k, m) {
                continue;
            }
            let last: BTreeSet<usize> = s
                .iter()
                .copied()
                .filter(|&a| self.mul(flip, k, a) == m)
                .collect();
            if last.is_empty() {
                continue;
            }
            let last = BlockExpr::symbols(&last);
            for n in self.mon.elements() {
                if !self.related(flip, n, k) {
                    continue;
                }
                let head = self.prefix_minimal(s, n, flip)?;
                if head.is_empty() {
                    continue;
                }
                let middle = self.stay(s, n, k, flip)?;
                out = out.union(&head.concat(&middle).concat(&last));
            }
        }
        let out = self.normalized(s, &out);
        self.prefixes.insert(key, out.clone());
        Ok(out)
    }

    /// `U_{n,k} = {w : n β(w) = k}`, whose words only use letters of `A_n`.
    fn stay(
        &mut self,
        s: &BTreeSet<usize>,
        n: usize,
        k: usize,
        flip: bool,
    ) -> Result<BlockExpr, WordError> {
        let sub = self.stable_letters(s, n, flip);
        if sub == *s {
            return Err(WordError::Cycle(format!(
                "{:?} does not shrink at {}",
                s,
                self.mon.name(n)
            )));
        }
        let mut out = BlockExpr::empty();
        for x in self.mon.elements() {
            if self.mul(flip, n, x) == k {
                let e = self.synth(&sub, x)?;
                out = out.union(&if flip { e.reversed() } else { e });
            }
        }
        Ok(self.normalized(s, &out))
    }
}

/// A block expression for `{w : β(w) = target}`.
///
/// Star sets are unions of whole `β`-classes and are checked to be
/// downward closed under the pre-order: if `a` is in a star set and
/// `β(b) ⪯ β(a)` then so is `b`.
pub fn synth_sigma2_word(
    beta: &WordMorphism,
    strat: &StratifiedMonoid,
    target: usize,
) -> Result<WordExpr, WordError> {
    let mon = strat.monoid();
    if let Some((m, n)) = check_da(mon) {
        return Err(WordError::NotDA {
            m: mon.name(m).to_string(),
            n: mon.name(n).to_string(),
        });
    }
    let images: BTreeSet<usize> = beta.images.iter().copied().collect();
    let downward = |set: &SymbolSet| {
        set.iter()
            .all(|&a| images.iter().all(|&b| !strat.le(b, a) || set.contains(&b)))
    };
    let abstract_expr = Synth::new(mon, &downward).synth(&images, target)?;
    let expr = abstract_expr.substitute(|x| {
        (0..beta.letters.len())
            .filter(|&a| beta.images[a] == x)
            .collect()
    });
    for set in expr.star_sets() {
        for &a in set {
            for b in 0..beta.letters.len() {
                assert!(
                    !strat.le(beta.images[b], beta.images[a]) || set.contains(&b),
                    "star set is not downward closed"
                );
            }
        }
    }
    Ok(WordExpr::new(beta.letters.clone(), expr))
}

/// `A_m = {a : m β(a) ∼R m}`.
pub fn stable_letters(mon: &FiniteMonoid, beta: &WordMorphism, m: usize) -> Vec<usize> {
    let g = green_classes(mon);
    (0..beta.letters.len())
        .filter(|&a| g.r_related(mon.mul(m, beta.images[a]), m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monoid(names: &[&str], rows: &[&[&str]]) -> FiniteMonoid {
        let idx = |s: &str| names.iter().position(|n| *n == s).unwrap();
        FiniteMonoid::new(
            names.iter().map(|s| s.to_string()).collect(),
            rows.iter()
                .map(|r| r.iter().map(|s| idx(s)).collect())
                .collect(),
            0,
        )
        .unwrap()
    }

    fn brandt() -> FiniteMonoid {
        monoid(
            &["1", "a", "b", "ab", "ba", "z"],
            &[
                &["1", "a", "b", "ab", "ba", "z"],
                &["a", "z", "ab", "z", "a", "z"],
                &["b", "ba", "z", "b", "z", "z"],
                &["ab", "a", "z", "ab", "z", "z"],
                &["ba", "z", "b", "z", "ba", "z"],
                &["z", "z", "z", "z", "z", "z"],
            ],
        )
    }

    fn left_zero() -> FiniteMonoid {
        monoid(
            &["1", "A", "B"],
            &[&["1", "A", "B"], &["A", "A", "A"], &["B", "B", "B"]],
        )
    }

    #[test]
    fn brandt_green() {
        let g = green_classes(&brandt());
        let classes = g.r_classes();
        assert!(classes.contains(&vec![0]));
        assert!(classes.contains(&vec![1, 3]));
        assert!(g.l_classes().contains(&vec![1, 4]));
        assert_eq!(
            green_classes(&FiniteMonoid::trivial()).r_classes(),
            vec![vec![0]]
        );
    }

    #[test]
    fn da_verdicts() {
        let b = brandt();
        let (m, n) = check_da(&b).unwrap();
        assert_eq!((b.name(m), b.name(n)), ("a", "b"));
        let e = b.omega(b.mul(m, n));
        assert_eq!(b.name(e), "ab");
        assert_eq!(b.name(b.product([e, m, e])), "z");
        assert_eq!(check_da(&left_zero()), None);
        assert_eq!(check_da(&FiniteMonoid::trivial()), None);
        assert_eq!(check_wilke1(&left_zero()), None);
        assert_eq!(check_wilke2(&left_zero()), None);
    }

    #[test]
    fn first_letter_a() {
        let mon = left_zero();
        let beta = WordMorphism::new(vec!["a".into(), "b".into()], vec![1, 2]);
        let e = synth_sigma2_word(&beta, &StratifiedMonoid::trivial(mon.clone()), 1).unwrap();
        for w in enumerate_words(2, 8) {
            assert_eq!(e.expr().matches(&w), beta.eval(&mon, &w) == 1, "{w:?}");
        }
        assert!(word_expr_member(&e, &["a", "b"]).unwrap());
        assert!(!word_expr_member(&e, &["b", "a"]).unwrap());
    }

    #[test]
    fn trivial_monoid_gives_full_star() {
        let beta = WordMorphism::new(vec!["a".into(), "b".into()], vec![0, 0]);
        let e = synth_sigma2_word(
            &beta,
            &StratifiedMonoid::trivial(FiniteMonoid::trivial()),
            0,
        )
        .unwrap();
        let blocks: Vec<&Block> = e.expr().blocks().collect();
        assert_eq!(blocks, vec![&Block::star(SymbolSet::from([0, 1]))]);
    }

    #[test]
    fn brandt_is_rejected() {
        let beta = WordMorphism::new(vec!["a".into(), "b".into()], vec![1, 2]);
        let err = synth_sigma2_word(&beta, &StratifiedMonoid::trivial(brandt()), 3).unwrap_err();
        assert_eq!(
            err,
            WordError::NotDA {
                m: "a".into(),
                n: "b".into()
            }
        );
    }

    #[test]
    fn stratification_is_checked() {
        // In the left-zero monoid A^w B A^w = A, so B below A is fine.
        let mut pre = vec![vec![false; 3]; 3];
        pre[2][1] = true;
        assert!(StratifiedMonoid::new(left_zero(), pre).is_ok());
        // In {1, z} with z absorbing, 1^w z 1^w = z != 1.
        let two = monoid(&["1", "z"], &[&["1", "z"], &["z", "z"]]);
        let pre = vec![vec![true, true], vec![true, true]];
        assert!(matches!(
            StratifiedMonoid::new(two, pre),
            Err(WordError::NotStratified { .. })
        ));
    }

    #[test]
    fn stable_letters_are_a_star() {
        let mon = left_zero();
        let beta = WordMorphism::new(vec!["a".into(), "b".into()], vec![1, 2]);
        assert_eq!(stable_letters(&mon, &beta, 1), vec![0, 1]);
        assert_eq!(stable_letters(&mon, &beta, 0), Vec::<usize>::new());
    }
}
