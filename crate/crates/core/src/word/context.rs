//! Contexts read as words over factors `a□`, `t+□` and `□+t`, and block
//! expressions for each context type over those factors.

use std::fmt;

use crate::algebra::Recognizer;
use crate::decide::{check_delta2, Order, Witness};
use crate::pieces::PieceRelation;
use crate::term::{Context, Forest, Node};

use super::{synth_sigma2_word, StratifiedMonoid, WordError, WordExpr, WordMorphism};

/// A factor class: a letter `a□`, or an insertion of a tree of type `h`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactorLetter {
    Letter(usize),
    InsLeft(usize),
    InsRight(usize),
}

impl FactorLetter {
    pub fn name(&self, rec: &Recognizer) -> String {
        let alg = rec.algebra();
        match *self {
            FactorLetter::Letter(a) => format!("{}([])", rec.alphabet().label(a)),
            FactorLetter::InsLeft(h) => format!("{}+[]", alg.h_name(h)),
            FactorLetter::InsRight(h) => format!("[]+{}", alg.h_name(h)),
        }
    }

    pub fn image(&self, rec: &Recognizer) -> usize {
        let alg = rec.algebra();
        match *self {
            FactorLetter::Letter(a) => rec.morphism().letter_image(a),
            FactorLetter::InsLeft(h) => alg.ins_left(h),
            FactorLetter::InsRight(h) => alg.ins_right(h),
        }
    }
}

fn factor_letters(rec: &Recognizer) -> Vec<FactorLetter> {
    let alg = rec.algebra();
    let mut out: Vec<FactorLetter> = (0..rec.alphabet().len())
        .map(FactorLetter::Letter)
        .collect();
    out.extend(alg.h().elements().map(FactorLetter::InsLeft));
    out.extend(alg.h().elements().map(FactorLetter::InsRight));
    out
}

/// Splits `p` into factors, outermost first: at each level the trees left
/// of the hole's branch from left to right, then those to its right from
/// the rightmost in, then the letter above the hole.
pub fn context_factor_word(
    rec: &Recognizer,
    p: &Context,
) -> Result<Vec<FactorLetter>, crate::algebra::AlgebraError> {
    let mut out = Vec::new();
    let mut level: &[Node] = p.roots();
    loop {
        let k = level
            .iter()
            .position(|n| n.hole_count() > 0)
            .expect("a context has a hole");
        for tree in &level[..k] {
            let t = Forest::from_nodes(vec![tree.clone()]).expect("hole-free");
            out.push(FactorLetter::InsLeft(rec.eval_forest(&t)?));
        }
        for tree in level[k + 1..].iter().rev() {
            let t = Forest::from_nodes(vec![tree.clone()]).expect("hole-free");
            out.push(FactorLetter::InsRight(rec.eval_forest(&t)?));
        }
        match &level[k] {
            Node::Hole => return Ok(out),
            Node::Tree { label, children } => {
                let a = rec.alphabet().index_of(label).ok_or_else(|| {
                    crate::algebra::AlgebraError::AlphabetMismatch(label.to_string())
                })?;
                out.push(FactorLetter::Letter(a));
                level = children;
            }
        }
    }
}

/// The contexts of one type as a block expression over factor classes.
#[derive(Clone, Debug)]
pub struct ContextDecomposition {
    pub target: usize,
    pub letters: Vec<FactorLetter>,
    pub expr: WordExpr,
}

impl ContextDecomposition {
    pub fn matches(
        &self,
        rec: &Recognizer,
        p: &Context,
    ) -> Result<bool, crate::algebra::AlgebraError> {
        let word: Vec<usize> = context_factor_word(rec, p)?
            .iter()
            .map(|f| {
                self.letters
                    .iter()
                    .position(|g| g == f)
                    .expect("every factor class is a letter")
            })
            .collect();
        Ok(self.expr.expr().matches(&word))
    }
}

impl fmt::Display for ContextDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

/// Decomposes the contexts of type `v`, treating the context monoid as a
/// stratified monoid under the piece relation.
pub fn decompose_context_types(
    rec: &Recognizer,
    rel: &PieceRelation,
    v: usize,
) -> Result<ContextDecomposition, WordError> {
    let alg = rec.algebra();
    if let Some(Witness::Identity { v: bad, w }) = check_delta2(alg, rel, Order::Lex).witness {
        return Err(WordError::IdentityFails {
            v: alg.v_name(bad).to_string(),
            w: alg.v_name(w).to_string(),
        });
    }
    let n = alg.v_len();
    let mut pre = vec![vec![false; n]; n];
    for (w, u) in rel.v_pairs() {
        pre[w][u] = true;
    }
    let strat = StratifiedMonoid::new(alg.v().clone(), pre)?;
    let letters = factor_letters(rec);
    let beta = WordMorphism::new(
        letters.iter().map(|l| l.name(rec)).collect(),
        letters.iter().map(|l| l.image(rec)).collect(),
    );
    let expr = synth_sigma2_word(&beta, &strat, v)?;
    Ok(ContextDecomposition {
        target: v,
        letters,
        expr,
    })
}
