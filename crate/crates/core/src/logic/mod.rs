//! First-order logic over forests with the descendant order, the
//! lexicographic order, label predicates and equality.
//!
//! Evaluation is by exhaustive quantifier expansion over the nodes, which
//! is only meant for small forests.

mod expr;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::Recognizer;
use crate::term::{enumerate_forests, Context, Forest, Label, Node};

pub use expr::{expr_member, ExprError, Sigma2Expr};
pub use parse::parse_formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("formula syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("node {0} does not belong to the forest")]
    ForeignNode(usize),
    #[error("formula is not in prenex form")]
    NotPrenex,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Label(Label, String),
    /// Strict ancestor.
    Less(String, String),
    Lex(String, String),
    Eq(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(x: &str, body: Formula) -> Formula {
        Formula::Exists(x.to_string(), Box::new(body))
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(x.to_string(), Box::new(body))
    }

    /// `x ≤ y`.
    pub fn le(x: &str, y: &str) -> Formula {
        Formula::or(
            Formula::Eq(x.into(), y.into()),
            Formula::Less(x.into(), y.into()),
        )
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => false,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            _ => true,
        }
    }

    pub fn quantifier_count(&self) -> usize {
        match self {
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_count(),
            Formula::Not(f) => f.quantifier_count(),
            Formula::And(a, b) | Formula::Or(a, b) => a.quantifier_count() + b.quantifier_count(),
            _ => 0,
        }
    }

    pub fn free_variables(&self) -> Vec<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
            let mut note = |x: &String, bound: &Vec<String>| {
                if !bound.contains(x) && !out.contains(x) {
                    out.push(x.clone());
                }
            };
            match f {
                Formula::True | Formula::False => {}
                Formula::Label(_, x) => note(x, bound),
                Formula::Less(x, y) | Formula::Lex(x, y) | Formula::Eq(x, y) => {
                    note(x, bound);
                    note(y, bound);
                }
                Formula::Not(g) => go(g, bound, out),
                Formula::And(a, b) | Formula::Or(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Exists(x, g) | Formula::Forall(x, g) => {
                    bound.push(x.clone());
                    go(g, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Label(a, x) => write!(f, "{a}({x})"),
            Formula::Less(x, y) => write!(f, "{x}<{y}"),
            Formula::Lex(x, y) => write!(f, "{x}<lex {y}"),
            Formula::Eq(x, y) => write!(f, "{x}={y}"),
            Formula::Not(g) => write!(f, "!{}", Paren(g)),
            Formula::And(a, b) => write!(f, "{} & {}", Paren(a), Paren(b)),
            Formula::Or(a, b) => write!(f, "{} | {}", Paren(a), Paren(b)),
            Formula::Exists(x, g) => write!(f, "E {x} {g}"),
            Formula::Forall(x, g) => write!(f, "A {x} {g}"),
        }
    }
}

struct Paren<'a>(&'a Formula);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Formula::And(..) | Formula::Or(..) | Formula::Exists(..) | Formula::Forall(..) => {
                write!(f, "({})", self.0)
            }
            other => write!(f, "{other}"),
        }
    }
}

/// A forest (or context) as a relational structure. Nodes are numbered in
/// document order; the hole of a context is an unlabelled node.
#[derive(Clone, Debug)]
pub struct Structure {
    labels: Vec<Option<Label>>,
    parent: Vec<Option<usize>>,
    /// Position among siblings; roots count as siblings of each other.
    position: Vec<usize>,
    /// One past the last node of the subtree.
    end: Vec<usize>,
}

impl Structure {
    pub fn from_nodes(nodes: &[Node]) -> Self {
        let mut s = Structure {
            labels: Vec::new(),
            parent: Vec::new(),
            position: Vec::new(),
            end: Vec::new(),
        };
        s.add(nodes, None);
        s
    }

    pub fn of_forest(t: &Forest) -> Self {
        Self::from_nodes(t.roots())
    }

    pub fn of_context(p: &Context) -> Self {
        Self::from_nodes(p.roots())
    }

    fn add(&mut self, nodes: &[Node], parent: Option<usize>) {
        for (i, node) in nodes.iter().enumerate() {
            let id = self.labels.len();
            self.parent.push(parent);
            self.position.push(i);
            self.end.push(0);
            match node {
                Node::Hole => self.labels.push(None),
                Node::Tree { label, children } => {
                    self.labels.push(Some(label.clone()));
                    self.add(children, Some(id));
                }
            }
            self.end[id] = self.labels.len();
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The index of the unlabelled node, if any.
    pub fn hole(&self) -> Option<usize> {
        self.labels.iter().position(Option::is_none)
    }

    pub fn has_label(&self, x: usize, a: &str) -> bool {
        self.labels[x].as_deref() == Some(a)
    }

    /// `x` is a strict ancestor of `y`.
    pub fn less(&self, x: usize, y: usize) -> bool {
        x < y && y < self.end[x]
    }

    fn ancestors_or_self(&self, mut x: usize) -> Vec<usize> {
        let mut out = vec![x];
        while let Some(p) = self.parent[x] {
            out.push(p);
            x = p;
        }
        out
    }

    /// Either `x < y`, or some `x' ≤ x` is a sibling to the left of some
    /// `y' ≤ y`.
    pub fn lex(&self, x: usize, y: usize) -> bool {
        if self.less(x, y) {
            return true;
        }
        let ys = self.ancestors_or_self(y);
        self.ancestors_or_self(x).iter().any(|&x2| {
            ys.iter().any(|&y2| {
                self.parent[x2] == self.parent[y2] && self.position[x2] < self.position[y2]
            })
        })
    }
}

/// Evaluates `phi` on `structure` under `assignment` (variable to node index).
pub fn eval_in(
    phi: &Formula,
    structure: &Structure,
    assignment: &BTreeMap<String, usize>,
) -> Result<bool, LogicError> {
    if let Some((_, &x)) = assignment.iter().find(|(_, &x)| x >= structure.len()) {
        return Err(LogicError::ForeignNode(x));
    }
    let mut env: Vec<(String, usize)> = assignment.iter().map(|(k, &v)| (k.clone(), v)).collect();
    eval_env(phi, structure, &mut env)
}

fn lookup(env: &[(String, usize)], x: &str) -> Result<usize, LogicError> {
    env.iter()
        .rev()
        .find(|(name, _)| name == x)
        .map(|(_, v)| *v)
        .ok_or_else(|| LogicError::UnboundVariable(x.to_string()))
}

fn eval_env(
    phi: &Formula,
    s: &Structure,
    env: &mut Vec<(String, usize)>,
) -> Result<bool, LogicError> {
    Ok(match phi {
        Formula::True => true,
        Formula::False => false,
        Formula::Label(a, x) => s.has_label(lookup(env, x)?, a),
        Formula::Less(x, y) => s.less(lookup(env, x)?, lookup(env, y)?),
        Formula::Lex(x, y) => s.lex(lookup(env, x)?, lookup(env, y)?),
        Formula::Eq(x, y) => lookup(env, x)? == lookup(env, y)?,
        Formula::Not(f) => !eval_env(f, s, env)?,
        Formula::And(a, b) => eval_env(a, s, env)? && eval_env(b, s, env)?,
        Formula::Or(a, b) => eval_env(a, s, env)? || eval_env(b, s, env)?,
        Formula::Exists(x, f) | Formula::Forall(x, f) => {
            let want = matches!(phi, Formula::Exists(..));
            for node in 0..s.len() {
                env.push((x.clone(), node));
                let r = eval_env(f, s, env);
                env.pop();
                if r? == want {
                    return Ok(want);
                }
            }
            !want
        }
    })
}

/// Evaluates a formula on a forest. Node indices in `assignment` follow
/// document order.
pub fn eval_formula(
    phi: &Formula,
    t: &Forest,
    assignment: &BTreeMap<String, usize>,
) -> Result<bool, LogicError> {
    eval_in(phi, &Structure::of_forest(t), assignment)
}

pub fn eval_sentence(phi: &Formula, t: &Forest) -> Result<bool, LogicError> {
    eval_formula(phi, t, &BTreeMap::new())
}

/// A formula with one free variable holds in a context when it holds with
/// that variable mapped to the hole.
pub fn eval_context_formula(
    phi: &Formula,
    hole_var: &str,
    p: &Context,
) -> Result<bool, LogicError> {
    let s = Structure::of_context(p);
    let hole = s.hole().expect("a context has a hole");
    eval_in(phi, &s, &BTreeMap::from([(hole_var.to_string(), hole)]))
}

/// Quantifier-alternation class of a prenex formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrenexClass {
    /// Quantifier-free.
    Sigma0,
    Sigma(usize),
    Pi(usize),
}

impl PrenexClass {
    /// Whether a formula of this class is also in `Σ_k`.
    pub fn within_sigma(self, k: usize) -> bool {
        match self {
            PrenexClass::Sigma0 => true,
            PrenexClass::Sigma(n) => n <= k,
            PrenexClass::Pi(n) => n < k,
        }
    }

    pub fn within_pi(self, k: usize) -> bool {
        match self {
            PrenexClass::Sigma0 => true,
            PrenexClass::Pi(n) => n <= k,
            PrenexClass::Sigma(n) => n < k,
        }
    }
}

impl fmt::Display for PrenexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrenexClass::Sigma0 => write!(f, "Sigma0"),
            PrenexClass::Sigma(n) => write!(f, "Sigma{n}"),
            PrenexClass::Pi(n) => write!(f, "Pi{n}"),
        }
    }
}

fn split_prefix(phi: &Formula) -> (Vec<(bool, &str)>, &Formula) {
    let mut prefix = Vec::new();
    let mut cur = phi;
    loop {
        match cur {
            Formula::Exists(x, f) => {
                prefix.push((true, x.as_str()));
                cur = f;
            }
            Formula::Forall(x, f) => {
                prefix.push((false, x.as_str()));
                cur = f;
            }
            _ => return (prefix, cur),
        }
    }
}

/// Counts the quantifier blocks of a prenex formula.
pub fn classify_prenex(phi: &Formula) -> Result<PrenexClass, LogicError> {
    let (prefix, matrix) = split_prefix(phi);
    if !matrix.is_quantifier_free() {
        return Err(LogicError::NotPrenex);
    }
    let Some(&(first, _)) = prefix.first() else {
        return Ok(PrenexClass::Sigma0);
    };
    let blocks = 1 + prefix.windows(2).filter(|w| w[0].0 != w[1].0).count();
    Ok(if first {
        PrenexClass::Sigma(blocks)
    } else {
        PrenexClass::Pi(blocks)
    })
}

/// The negation of a prenex formula, kept prenex: quantifiers are dualized
/// and the matrix negated.
pub fn negate_prenex(phi: &Formula) -> Result<Formula, LogicError> {
    let (prefix, matrix) = split_prefix(phi);
    if !matrix.is_quantifier_free() {
        return Err(LogicError::NotPrenex);
    }
    let mut out = Formula::not(matrix.clone());
    for &(exists, x) in prefix.iter().rev() {
        out = if exists {
            Formula::forall(x, out)
        } else {
            Formula::exists(x, out)
        };
    }
    Ok(out)
}

/// Compares a sentence with a recognized language on every forest of at
/// most `max_nodes` nodes; returns the first forest where they differ.
pub fn formula_language_equal(
    phi: &Formula,
    rec: &Recognizer,
    max_nodes: usize,
) -> Result<Option<Forest>, LogicError> {
    for t in enumerate_forests(rec.alphabet(), max_nodes) {
        let member = rec
            .member(&t)
            .expect("enumerated over the recognizer's alphabet");
        if eval_sentence(phi, &t)? != member {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// "Some node is an ancestor of every other node" (∃∀).
pub fn tree_test_sigma2() -> Formula {
    Formula::exists("x", Formula::forall("y", Formula::le("x", "y")))
}

/// "Any two nodes have a common ancestor" (∀∀∃).
pub fn tree_test_pi2() -> Formula {
    Formula::forall(
        "y1",
        Formula::forall(
            "y2",
            Formula::exists(
                "x",
                Formula::and(Formula::le("x", "y1"), Formula::le("x", "y2")),
            ),
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_context, parse_forest, Alphabet};

    fn f(text: &str) -> Forest {
        parse_forest(text, None).unwrap()
    }

    #[test]
    fn exists_a() {
        let phi = parse_formula("E x a(x)").unwrap();
        assert!(eval_sentence(&phi, &f("a+b")).unwrap());
        assert!(!eval_sentence(&phi, &f("b(b)")).unwrap());
    }

    #[test]
    fn tree_tests_on_the_empty_forest() {
        assert!(!eval_sentence(&tree_test_sigma2(), &Forest::empty()).unwrap());
        assert!(eval_sentence(&tree_test_pi2(), &Forest::empty()).unwrap());
        assert!(eval_sentence(&tree_test_sigma2(), &f("a(b+c)")).unwrap());
        assert!(!eval_sentence(&tree_test_sigma2(), &f("a+b")).unwrap());
        assert!(!eval_sentence(&tree_test_pi2(), &f("a+b")).unwrap());
    }

    #[test]
    fn orders() {
        // a(b+c)+d : a=0, b=1, c=2, d=3
        let s = Structure::of_forest(&f("a(b+c)+d"));
        assert!(s.less(0, 1) && s.less(0, 2) && !s.less(1, 2) && !s.less(0, 3));
        assert!(s.lex(0, 1) && s.lex(1, 2) && s.lex(2, 3) && s.lex(0, 3));
        assert!(!s.lex(3, 0) && !s.lex(1, 0) && !s.lex(0, 0));
    }

    #[test]
    fn lex_is_document_order() {
        let ab = Alphabet::new(["a", "b"]);
        for t in enumerate_forests(&ab, 5) {
            let s = Structure::of_forest(&t);
            for x in 0..s.len() {
                for y in 0..s.len() {
                    assert_eq!(s.lex(x, y), x < y, "{t} {x} {y}");
                }
            }
        }
    }

    #[test]
    fn assignments() {
        let phi = parse_formula("x<y").unwrap();
        let t = f("a(b)");
        let asg = BTreeMap::from([("x".to_string(), 0), ("y".to_string(), 1)]);
        assert!(eval_formula(&phi, &t, &asg).unwrap());
        assert_eq!(
            eval_formula(&phi, &t, &BTreeMap::from([("x".to_string(), 0)])),
            Err(LogicError::UnboundVariable("y".into()))
        );
        let far = BTreeMap::from([("x".to_string(), 0), ("y".to_string(), 7)]);
        assert_eq!(
            eval_formula(&phi, &t, &far),
            Err(LogicError::ForeignNode(7))
        );
    }

    #[test]
    fn context_formulas() {
        // "the hole is below an a-node"
        let phi = parse_formula("E y (a(y) & y<h)").unwrap();
        assert!(
            eval_context_formula(&phi, "h", &parse_context("a(b([]))", None).unwrap()).unwrap()
        );
        assert!(!eval_context_formula(&phi, "h", &parse_context("a+[]", None).unwrap()).unwrap());
    }

    #[test]
    fn classification() {
        let c = |s: &str| classify_prenex(&parse_formula(s).unwrap());
        assert_eq!(c("E x A y (x=y | x<y)"), Ok(PrenexClass::Sigma(2)));
        assert_eq!(c("A x a(x)"), Ok(PrenexClass::Pi(1)));
        assert_eq!(c("A x A y E z (z<x)"), Ok(PrenexClass::Pi(2)));
        assert_eq!(c("x=y"), Ok(PrenexClass::Sigma0));
        assert_eq!(c("E x (a(x) & A y (y=x))"), Err(LogicError::NotPrenex));
        assert!(PrenexClass::Pi(1).within_pi(2) && PrenexClass::Pi(1).within_sigma(2));
        assert!(!PrenexClass::Pi(2).within_sigma(2));
    }

    #[test]
    fn negation_duality() {
        let phi = tree_test_sigma2();
        let neg = negate_prenex(&phi).unwrap();
        assert_eq!(classify_prenex(&neg), Ok(PrenexClass::Pi(2)));
        let ab = Alphabet::new(["a", "b"]);
        for t in enumerate_forests(&ab, 4) {
            assert_eq!(
                eval_sentence(&neg, &t).unwrap(),
                !eval_sentence(&phi, &t).unwrap()
            );
        }
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "E x A y (x=y | x<y)",
            "A x !a(x)",
            "E x E y (a(x) & b(y) & x<lex y)",
        ] {
            let phi = parse_formula(text).unwrap();
            assert_eq!(parse_formula(&phi.to_string()).unwrap(), phi, "{phi}");
        }
    }
}
