use std::collections::BTreeMap;

use super::{AlgebraError, AutomatonSpec, ForestAlgebra};
use crate::term::{Alphabet, Context, Forest, Node, Term};

/// A morphism from the free forest algebra over `alphabet` into a finite
/// forest algebra, fixed by the image of each letter context `a□`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    alphabet: Alphabet,
    letter_image: Vec<usize>,
}

impl Morphism {
    pub fn new(alphabet: Alphabet, letter_image: Vec<usize>) -> Self {
        assert_eq!(alphabet.len(), letter_image.len(), "one image per letter");
        Morphism {
            alphabet,
            letter_image,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn letter_image(&self, letter: usize) -> usize {
        self.letter_image[letter]
    }

    pub fn letter_images(&self) -> &[usize] {
        &self.letter_image
    }

    fn image_of(&self, label: &str) -> Result<usize, AlgebraError> {
        self.alphabet
            .index_of(label)
            .map(|i| self.letter_image[i])
            .ok_or_else(|| AlgebraError::AlphabetMismatch(label.to_string()))
    }

    fn eval_nodes(&self, alg: &ForestAlgebra, nodes: &[Node]) -> Result<usize, AlgebraError> {
        let mut acc = alg.zero();
        for node in nodes {
            let value = match node {
                Node::Tree { label, children } => {
                    alg.act(self.image_of(label)?, self.eval_nodes(alg, children)?)
                }
                Node::Hole => unreachable!("hole inside a forest"),
            };
            acc = alg.plus(acc, value);
        }
        Ok(acc)
    }

    fn eval_context_nodes(
        &self,
        alg: &ForestAlgebra,
        nodes: &[Node],
    ) -> Result<usize, AlgebraError> {
        let at = nodes
            .iter()
            .position(|n| n.hole_count() == 1)
            .expect("context has a hole");
        let left = self.eval_nodes(alg, &nodes[..at])?;
        let right = self.eval_nodes(alg, &nodes[at + 1..])?;
        let inner = match &nodes[at] {
            Node::Hole => alg.hole(),
            Node::Tree { label, children } => alg.compose(
                self.image_of(label)?,
                self.eval_context_nodes(alg, children)?,
            ),
        };
        Ok(alg.compose(alg.compose(alg.ins_left(left), alg.ins_right(right)), inner))
    }

    pub fn eval_forest(&self, alg: &ForestAlgebra, t: &Forest) -> Result<usize, AlgebraError> {
        self.eval_nodes(alg, t.roots())
    }

    pub fn eval_context(&self, alg: &ForestAlgebra, p: &Context) -> Result<usize, AlgebraError> {
        self.eval_context_nodes(alg, p.roots())
    }

    /// An `H` element for forests, a `V` element for contexts.
    pub fn eval_term(&self, alg: &ForestAlgebra, t: &Term) -> Result<usize, AlgebraError> {
        match t {
            Term::Forest(f) => self.eval_forest(alg, f),
            Term::Context(c) => self.eval_context(alg, c),
        }
    }
}

/// A forest algebra with a morphism and an accepting subset of `H`: a
/// finite description of the language `α⁻¹(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recognizer {
    algebra: ForestAlgebra,
    morphism: Morphism,
    accepting: Vec<bool>,
}

impl Recognizer {
    pub fn new(algebra: ForestAlgebra, morphism: Morphism, accepting: Vec<bool>) -> Self {
        assert_eq!(accepting.len(), algebra.h_len());
        assert!(morphism
            .letter_images()
            .iter()
            .all(|&v| v < algebra.v_len()));
        Recognizer {
            algebra,
            morphism,
            accepting,
        }
    }

    pub fn algebra(&self) -> &ForestAlgebra {
        &self.algebra
    }

    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.morphism.alphabet()
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    pub fn is_accepting(&self, h: usize) -> bool {
        self.accepting[h]
    }

    pub fn eval_forest(&self, t: &Forest) -> Result<usize, AlgebraError> {
        self.morphism.eval_forest(&self.algebra, t)
    }

    pub fn eval_context(&self, p: &Context) -> Result<usize, AlgebraError> {
        self.morphism.eval_context(&self.algebra, p)
    }

    pub fn eval_term(&self, t: &Term) -> Result<usize, AlgebraError> {
        self.morphism.eval_term(&self.algebra, t)
    }

    pub fn member(&self, t: &Forest) -> Result<bool, AlgebraError> {
        Ok(self.accepting[self.eval_forest(t)?])
    }

    /// The automaton view of this recognizer: `delta(a, h)` is the action of
    /// the letter image on `h`.
    pub fn to_spec(&self) -> AutomatonSpec {
        let alg = &self.algebra;
        let names = alg.h().names();
        let delta = self
            .alphabet()
            .letters()
            .iter()
            .zip(self.morphism.letter_images())
            .map(|(a, &v)| {
                let row: BTreeMap<String, String> = alg
                    .h()
                    .elements()
                    .map(|h| (names[h].clone(), names[alg.act(v, h)].clone()))
                    .collect();
                (a.to_string(), row)
            })
            .collect();
        AutomatonSpec {
            alphabet: self
                .alphabet()
                .letters()
                .iter()
                .map(|a| a.to_string())
                .collect(),
            h: names.to_vec(),
            zero: names[alg.zero()].clone(),
            plus: alg
                .h()
                .table_rows()
                .iter()
                .map(|row| row.iter().map(|&x| names[x].clone()).collect())
                .collect(),
            delta,
            accepting: alg
                .h()
                .elements()
                .filter(|&h| self.accepting[h])
                .map(|h| names[h].clone())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::build_transition_algebra;
    use super::*;
    use crate::term::{enumerate_contexts, enumerate_forests, parse_context, parse_forest};

    fn f1() -> Recognizer {
        let spec: AutomatonSpec = serde_json::from_str(
            r#"{"alphabet":["a","b"],"H":["n","y"],"zero":"n",
                "plus":[["n","y"],["y","y"]],
                "delta":{"a":{"n":"y","y":"y"},"b":{"n":"n","y":"y"}},
                "accepting":["y"]}"#,
        )
        .unwrap();
        build_transition_algebra(&spec).unwrap()
    }

    #[test]
    fn f1_examples() {
        let rec = f1();
        let y = rec.algebra().h().index_of("y").unwrap();
        assert_eq!(
            rec.eval_forest(&parse_forest("b(a)", None).unwrap())
                .unwrap(),
            y
        );
        assert_eq!(
            rec.eval_forest(&Forest::empty()).unwrap(),
            rec.algebra().zero()
        );
        let cy = rec
            .eval_context(&parse_context("a([])", None).unwrap())
            .unwrap();
        assert_eq!(rec.algebra().transformation(cy), &[y, y]);
        assert_eq!(
            rec.eval_context(&Context::hole()).unwrap(),
            rec.algebra().hole()
        );
        assert!(rec.member(&parse_forest("a", None).unwrap()).unwrap());
        assert!(!rec.member(&parse_forest("b+b", None).unwrap()).unwrap());
        assert!(!rec.member(&Forest::empty()).unwrap());
    }

    #[test]
    fn unknown_label() {
        let rec = f1();
        assert_eq!(
            rec.eval_forest(&parse_forest("c", None).unwrap()),
            Err(AlgebraError::AlphabetMismatch("c".into()))
        );
    }

    #[test]
    fn morphism_laws_on_small_terms() {
        let rec = f1();
        let alg = rec.algebra();
        let ab = rec.alphabet().clone();
        let forests = enumerate_forests(&ab, 3);
        let contexts = enumerate_contexts(&ab, 3);
        for s in &forests {
            for t in &forests {
                let lhs = rec.eval_forest(&s.concat(t)).unwrap();
                assert_eq!(
                    lhs,
                    alg.plus(rec.eval_forest(s).unwrap(), rec.eval_forest(t).unwrap())
                );
            }
            for p in &contexts {
                let lhs = rec.eval_forest(&p.apply(s)).unwrap();
                assert_eq!(
                    lhs,
                    alg.act(rec.eval_context(p).unwrap(), rec.eval_forest(s).unwrap())
                );
            }
        }
    }

    #[test]
    fn spec_round_trip() {
        let rec = f1();
        let again = build_transition_algebra(&rec.to_spec()).unwrap();
        assert_eq!(again, rec);
    }
}
