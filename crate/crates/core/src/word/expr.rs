//! Unions of blocks `A0* b1 A1* ... bi Ai*` over a finite symbol set, with
//! the closure operations done block by block.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::WordError;

pub type SymbolSet = BTreeSet<usize>;

/// `stars[0]* anchors[0] stars[1]* ... anchors[i-1] stars[i]*`. An empty
/// star set stands for the empty word only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub stars: Vec<SymbolSet>,
    pub anchors: Vec<SymbolSet>,
}

impl Block {
    pub fn star(set: SymbolSet) -> Self {
        Block {
            stars: vec![set],
            anchors: Vec::new(),
        }
    }

    fn matches(&self, word: &[usize]) -> bool {
        let segments = self.stars.len();
        let mut current = vec![false; segments];
        current[0] = true;
        for &x in word {
            let mut next = vec![false; segments];
            for j in 0..segments {
                if !current[j] {
                    continue;
                }
                if self.stars[j].contains(&x) {
                    next[j] = true;
                }
                if j + 1 < segments && self.anchors[j].contains(&x) {
                    next[j + 1] = true;
                }
            }
            if !next.iter().any(|&b| b) {
                return false;
            }
            current = next;
        }
        current[segments - 1]
    }

    fn reversed(&self) -> Block {
        Block {
            stars: self.stars.iter().rev().cloned().collect(),
            anchors: self.anchors.iter().rev().cloned().collect(),
        }
    }
}

/// A finite union of blocks; no blocks is the empty language.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BlockExpr {
    blocks: BTreeSet<Block>,
}

impl BlockExpr {
    pub fn empty() -> Self {
        BlockExpr::default()
    }

    pub fn epsilon() -> Self {
        Self::from_block(Block::star(SymbolSet::new()))
    }

    pub fn star(set: SymbolSet) -> Self {
        Self::from_block(Block::star(set))
    }

    /// The one-letter words over `set`, one block per symbol.
    pub fn symbols(set: &SymbolSet) -> Self {
        BlockExpr {
            blocks: set
                .iter()
                .map(|&x| Block {
                    stars: vec![SymbolSet::new(), SymbolSet::new()],
                    anchors: vec![SymbolSet::from([x])],
                })
                .collect(),
        }
    }

    pub fn from_block(block: Block) -> Self {
        BlockExpr {
            blocks: BTreeSet::from([block]),
        }
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.blocks.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn union(&self, other: &BlockExpr) -> BlockExpr {
        BlockExpr {
            blocks: self.blocks.union(&other.blocks).cloned().collect(),
        }
    }

    pub fn concat(&self, other: &BlockExpr) -> BlockExpr {
        let mut blocks = BTreeSet::new();
        for x in &self.blocks {
            for y in &other.blocks {
                concat_blocks(x, y, &mut blocks);
            }
        }
        BlockExpr { blocks }
    }

    pub fn intersect(&self, other: &BlockExpr) -> BlockExpr {
        let mut blocks = BTreeSet::new();
        for x in &self.blocks {
            for y in &other.blocks {
                if covered(x, &[y]) {
                    blocks.insert(x.clone());
                } else if covered(y, &[x]) {
                    blocks.insert(y.clone());
                } else {
                    let mut stars = vec![&x.stars[0] & &y.stars[0]];
                    merge(x, y, 0, 0, &mut stars, &mut Vec::new(), &mut blocks);
                }
            }
        }
        BlockExpr { blocks }
    }

    pub fn reversed(&self) -> BlockExpr {
        BlockExpr {
            blocks: self.blocks.iter().map(Block::reversed).collect(),
        }
    }

    pub fn matches(&self, word: &[usize]) -> bool {
        self.blocks.iter().any(|b| b.matches(word))
    }

    /// Replaces every symbol by the symbols `f` assigns to it.
    pub fn substitute(&self, f: impl Fn(usize) -> Vec<usize>) -> BlockExpr {
        let map = |s: &SymbolSet| -> SymbolSet { s.iter().flat_map(|&x| f(x)).collect() };
        let mut blocks = BTreeSet::new();
        for b in &self.blocks {
            let stars = b.stars.iter().map(map).collect();
            let anchors: Vec<SymbolSet> = b.anchors.iter().map(map).collect();
            if anchors.iter().all(|a| !a.is_empty()) {
                blocks.insert(Block { stars, anchors });
            }
        }
        BlockExpr { blocks }
    }

    /// Drops every block whose language is covered by the remaining ones.
    pub fn simplified(&self) -> BlockExpr {
        let mut kept: Vec<Block> = self.blocks.iter().cloned().collect();
        // Longer blocks are tried first; they are the likelier to be covered.
        kept.sort_by_key(|b| std::cmp::Reverse(b.anchors.len()));
        // A cheap pass against single blocks first.
        let mut i = 0;
        while i < kept.len() {
            if (0..kept.len()).any(|j| j != i && covered(&kept[i], &[&kept[j]])) {
                kept.remove(i);
            } else {
                i += 1;
            }
        }
        let mut i = 0;
        while i < kept.len() {
            let others: Vec<&Block> = kept
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, b)| b)
                .collect();
            if covered(&kept[i], &others) {
                kept.remove(i);
            } else {
                i += 1;
            }
        }
        BlockExpr {
            blocks: kept.into_iter().collect(),
        }
    }

    /// Grows star sets with symbols from `symbols` as long as each block
    /// stays inside the language and `allowed` accepts the new set, then
    /// drops covered blocks. The language does not change.
    pub fn widened(&self, symbols: &SymbolSet, allowed: impl Fn(&SymbolSet) -> bool) -> BlockExpr {
        let original: Vec<&Block> = self.blocks.iter().collect();
        let mut blocks = BTreeSet::new();
        for b in &self.blocks {
            let mut b = b.clone();
            for j in 0..b.stars.len() {
                for &x in symbols {
                    if b.stars[j].contains(&x) {
                        continue;
                    }
                    let mut candidate = b.clone();
                    candidate.stars[j].insert(x);
                    if allowed(&candidate.stars[j]) && covered(&candidate, &original) {
                        b = candidate;
                    }
                }
            }
            blocks.insert(b);
        }
        BlockExpr { blocks }.simplified()
    }

    /// All star sets of all blocks.
    pub fn star_sets(&self) -> impl Iterator<Item = &SymbolSet> {
        self.blocks.iter().flat_map(|b| b.stars.iter())
    }
}

fn step(b: &Block, active: &[bool], x: usize) -> Vec<bool> {
    let mut next = vec![false; active.len()];
    for j in 0..active.len() {
        if active[j] {
            if b.stars[j].contains(&x) {
                next[j] = true;
            }
            if j + 1 < active.len() && b.anchors[j].contains(&x) {
                next[j + 1] = true;
            }
        }
    }
    next
}

/// Whether every word of `b` is matched by one of `others`, by a search
/// over the reachable state sets.
fn covered(b: &Block, others: &[&Block]) -> bool {
    let symbols: SymbolSet = b
        .stars
        .iter()
        .chain(&b.anchors)
        .flatten()
        .copied()
        .collect();
    let start = |blk: &Block| {
        let mut v = vec![false; blk.stars.len()];
        v[0] = true;
        v
    };
    let init = (
        start(b),
        others.iter().map(|o| start(o)).collect::<Vec<_>>(),
    );
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![init.clone()];
    seen.insert(init);
    while let Some((mine, theirs)) = stack.pop() {
        let accepted = *mine.last().unwrap();
        if accepted && !theirs.iter().any(|t| *t.last().unwrap()) {
            return false;
        }
        for &x in &symbols {
            let next_mine = step(b, &mine, x);
            if !next_mine.iter().any(|&a| a) {
                continue;
            }
            let next_theirs: Vec<Vec<bool>> = others
                .iter()
                .zip(&theirs)
                .map(|(o, t)| step(o, t, x))
                .collect();
            let state = (next_mine, next_theirs);
            if seen.insert(state.clone()) {
                stack.push(state);
            }
        }
    }
    true
}

/// `A* C*`: `C*` if `A ⊆ C`, `A*` if `C ⊆ A`, otherwise `A* ∪ A* c C*` for
/// each `c ∈ C \ A`.
fn concat_blocks(x: &Block, y: &Block, out: &mut BTreeSet<Block>) {
    let a = x.stars.last().unwrap();
    let c = &y.stars[0];
    let join = |seam: Vec<SymbolSet>, extra: Option<SymbolSet>| {
        let mut stars = x.stars[..x.stars.len() - 1].to_vec();
        let mut anchors = x.anchors.clone();
        match extra {
            None => stars.extend(seam),
            Some(anchor) => {
                stars.push(seam[0].clone());
                anchors.push(anchor);
                stars.push(seam[1].clone());
            }
        }
        stars.extend_from_slice(&y.stars[1..]);
        anchors.extend_from_slice(&y.anchors);
        Block { stars, anchors }
    };
    if a.is_subset(c) {
        out.insert(join(vec![c.clone()], None));
    } else if c.is_subset(a) {
        out.insert(join(vec![a.clone()], None));
    } else {
        out.insert(join(vec![a.clone()], None));
        for &s in c.difference(a) {
            out.insert(join(vec![a.clone(), c.clone()], Some(SymbolSet::from([s]))));
        }
    }
}

/// Merges the anchor sequences of `x` and `y` in every order, consuming
/// `x.anchors[p..]` and `y.anchors[q..]`.
fn merge(
    x: &Block,
    y: &Block,
    p: usize,
    q: usize,
    stars: &mut Vec<SymbolSet>,
    anchors: &mut Vec<SymbolSet>,
    out: &mut BTreeSet<Block>,
) {
    if p == x.anchors.len() && q == y.anchors.len() {
        out.insert(Block {
            stars: stars.clone(),
            anchors: anchors.clone(),
        });
        return;
    }
    let mut step = |anchor: SymbolSet,
                    p2: usize,
                    q2: usize,
                    stars: &mut Vec<SymbolSet>,
                    anchors: &mut Vec<SymbolSet>| {
        if anchor.is_empty() {
            return;
        }
        anchors.push(anchor);
        stars.push(&x.stars[p2] & &y.stars[q2]);
        merge(x, y, p2, q2, stars, anchors, out);
        stars.pop();
        anchors.pop();
    };
    if p < x.anchors.len() {
        step(&x.anchors[p] & &y.stars[q], p + 1, q, stars, anchors);
    }
    if q < y.anchors.len() {
        step(&x.stars[p] & &y.anchors[q], p, q + 1, stars, anchors);
    }
    if p < x.anchors.len() && q < y.anchors.len() {
        step(&x.anchors[p] & &y.anchors[q], p + 1, q + 1, stars, anchors);
    }
}

/// A block expression over named letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordExpr {
    letters: Vec<String>,
    expr: BlockExpr,
}

#[derive(Serialize)]
struct BlockJson<'a> {
    stars: Vec<Vec<&'a str>>,
    anchors: Vec<Vec<&'a str>>,
}

impl WordExpr {
    pub fn new(letters: Vec<String>, expr: BlockExpr) -> Self {
        WordExpr { letters, expr }
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn expr(&self) -> &BlockExpr {
        &self.expr
    }

    fn names(&self, set: &SymbolSet) -> Vec<&str> {
        set.iter().map(|&x| self.letters[x].as_str()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let blocks: Vec<BlockJson> = self
            .expr
            .blocks()
            .map(|b| BlockJson {
                stars: b.stars.iter().map(|s| self.names(s)).collect(),
                anchors: b.anchors.iter().map(|s| self.names(s)).collect(),
            })
            .collect();
        serde_json::to_value(blocks).expect("serializable")
    }

    pub fn letter_index(&self, letter: &str) -> Result<usize, WordError> {
        self.letters
            .iter()
            .position(|l| l == letter)
            .ok_or_else(|| WordError::UnknownLetter(letter.to_string()))
    }
}

impl fmt::Display for WordExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expr.is_empty() {
            return write!(f, "{{}}");
        }
        let set = |s: &SymbolSet| format!("{{{}}}", self.names(s).join(","));
        let mut first = true;
        for b in self.expr.blocks() {
            if !first {
                write!(f, " | ")?;
            }
            first = false;
            write!(f, "{}*", set(&b.stars[0]))?;
            for (anchor, star) in b.anchors.iter().zip(&b.stars[1..]) {
                write!(f, " {} {}*", set(anchor), set(star))?;
            }
        }
        Ok(())
    }
}

pub fn word_expr_member(e: &WordExpr, word: &[&str]) -> Result<bool, WordError> {
    let symbols = word
        .iter()
        .map(|l| e.letter_index(l))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(e.expr.matches(&symbols))
}

/// Every word of length at most `max_len` over `0..symbols`, shortest first.
pub fn enumerate_words(symbols: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for x in 0..symbols {
                let mut w2: Vec<usize> = w.clone();
                w2.push(x);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Checks `expr` against `language` on all words up to `max_len`; returns
/// the first disagreement.
pub fn first_disagreement(
    expr: &BlockExpr,
    symbols: usize,
    max_len: usize,
    language: impl Fn(&[usize]) -> bool,
) -> Option<Vec<usize>> {
    enumerate_words(symbols, max_len)
        .into_iter()
        .find(|w| expr.matches(w) != language(w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> SymbolSet {
        xs.iter().copied().collect()
    }

    /// Naive semantics by splitting the word at every possible anchor position.
    fn naive(b: &Block, w: &[usize]) -> bool {
        fn go(b: &Block, seg: usize, w: &[usize]) -> bool {
            if seg == b.anchors.len() {
                return w.iter().all(|x| b.stars[seg].contains(x));
            }
            (0..w.len()).any(|i| {
                w[..i].iter().all(|x| b.stars[seg].contains(x))
                    && b.anchors[seg].contains(&w[i])
                    && go(b, seg + 1, &w[i + 1..])
            })
        }
        go(b, 0, w)
    }

    fn samples() -> Vec<BlockExpr> {
        vec![
            BlockExpr::epsilon(),
            BlockExpr::empty(),
            BlockExpr::star(set(&[0, 1])),
            BlockExpr::star(set(&[0])),
            BlockExpr::symbols(&set(&[0])).concat(&BlockExpr::star(set(&[0, 1, 2]))),
            BlockExpr::star(set(&[1]))
                .concat(&BlockExpr::symbols(&set(&[2])))
                .concat(&BlockExpr::star(set(&[0, 2]))),
            BlockExpr::star(set(&[0, 1])).concat(&BlockExpr::symbols(&set(&[1, 2]))),
        ]
    }

    #[test]
    fn dp_agrees_with_naive_semantics() {
        for e in samples() {
            for w in enumerate_words(3, 5) {
                assert_eq!(
                    e.matches(&w),
                    e.blocks().any(|b| naive(b, &w)),
                    "{e:?} {w:?}"
                );
            }
        }
    }

    #[test]
    fn closure_operations() {
        let words = enumerate_words(3, 6);
        for x in samples() {
            for y in samples() {
                let (c, i, u) = (x.concat(&y), x.intersect(&y), x.union(&y));
                for w in &words {
                    let split = (0..=w.len()).any(|k| x.matches(&w[..k]) && y.matches(&w[k..]));
                    assert_eq!(c.matches(w), split, "concat {x:?} {y:?} {w:?}");
                    assert_eq!(
                        i.matches(w),
                        x.matches(w) && y.matches(w),
                        "intersect {w:?}"
                    );
                    assert_eq!(u.matches(w), x.matches(w) || y.matches(w));
                }
            }
        }
    }

    #[test]
    fn simplification_keeps_the_language() {
        let words = enumerate_words(3, 6);
        for x in samples() {
            for y in samples() {
                let e = x.concat(&y).union(&x.intersect(&y)).union(&y);
                let s = e.simplified();
                assert!(s.len() <= e.len());
                for w in &words {
                    assert_eq!(s.matches(w), e.matches(w));
                }
            }
        }
        let redundant = BlockExpr::star(set(&[0, 1])).union(&BlockExpr::symbols(&set(&[0])));
        assert_eq!(redundant.simplified(), BlockExpr::star(set(&[0, 1])));
    }

    #[test]
    fn widening_keeps_the_language() {
        // a ∪ aa ∪ aaa* is a+.
        let a = BlockExpr::symbols(&set(&[0]));
        let e = a
            .union(&a.concat(&a))
            .union(&a.concat(&a).concat(&BlockExpr::star(set(&[0]))));
        let w = e.widened(&set(&[0, 1]), |_| true);
        assert_eq!(w.len(), 1);
        for word in enumerate_words(2, 6) {
            assert_eq!(w.matches(&word), e.matches(&word));
        }
    }

    #[test]
    fn reversal() {
        let e = BlockExpr::symbols(&set(&[0])).concat(&BlockExpr::star(set(&[1])));
        let r = e.reversed();
        assert!(r.matches(&[1, 1, 0]) && !r.matches(&[0, 1]));
    }

    #[test]
    fn named_membership() {
        let e = WordExpr::new(
            vec!["a".into(), "b".into()],
            BlockExpr::symbols(&set(&[0])).concat(&BlockExpr::star(set(&[0, 1]))),
        );
        assert!(word_expr_member(&e, &["a", "b"]).unwrap());
        assert!(!word_expr_member(&e, &["b", "a"]).unwrap());
        assert!(!word_expr_member(&e, &[]).unwrap());
        assert_eq!(
            word_expr_member(&e, &["c"]),
            Err(WordError::UnknownLetter("c".into()))
        );
        let all = WordExpr::new(vec!["a".into()], BlockExpr::star(set(&[0])));
        assert!(word_expr_member(&all, &[]).unwrap());
        assert_eq!(e.to_string(), "{}* {a} {a,b}*");
    }
}
