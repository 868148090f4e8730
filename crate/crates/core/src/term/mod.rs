//! Finite unranked ordered forests and one-hole contexts.
//!
//! A forest is a (possibly empty) sequence of trees; a context is a forest in
//! which exactly one leaf has been replaced by the hole `[]`. Both share the
//! [`Node`] representation and differ only in the hole invariant, which the
//! constructors and the parser enforce.

mod enumerate;
mod parse;
mod piece;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use enumerate::{enumerate_contexts, enumerate_forests, enumerate_terms};
pub use parse::{parse_context, parse_forest, parse_term};
pub use piece::{is_piece_term, pieces_of};

pub type Label = Arc<str>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("label `{0}` is not in the alphabet")]
    UnknownLabel(String),
    #[error("a context needs exactly one hole, found {0}")]
    HoleCount(usize),
    #[error("cannot relate a forest to a context")]
    KindMismatch,
}

/// Whether a term is a forest or a context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermKind {
    Forest,
    Context,
}

/// An ordered, duplicate-free set of labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Alphabet {
    letters: Vec<Label>,
}

impl Alphabet {
    pub fn new<I, S>(letters: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out: Vec<Label> = Vec::new();
        for l in letters {
            let l = l.as_ref();
            if !out.iter().any(|x| &**x == l) {
                out.push(Label::from(l));
            }
        }
        Alphabet { letters: out }
    }

    pub fn letters(&self) -> &[Label] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.letters.iter().position(|l| &**l == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index_of(label).is_some()
    }

    pub fn label(&self, index: usize) -> &Label {
        &self.letters[index]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Hole,
    Tree { label: Label, children: Vec<Node> },
}

impl Node {
    pub fn node_count(&self) -> usize {
        match self {
            Node::Hole => 0,
            Node::Tree { children, .. } => 1 + count_nodes(children),
        }
    }

    pub fn hole_count(&self) -> usize {
        match self {
            Node::Hole => 1,
            Node::Tree { children, .. } => count_holes(children),
        }
    }
}

pub(crate) fn count_nodes(nodes: &[Node]) -> usize {
    nodes.iter().map(Node::node_count).sum()
}

pub(crate) fn count_holes(nodes: &[Node]) -> usize {
    nodes.iter().map(Node::hole_count).sum()
}

/// Replaces every hole in `nodes` by the sequence `fill`.
fn substitute(nodes: &[Node], fill: &[Node]) -> Vec<Node> {
    let mut out = Vec::with_capacity(nodes.len() + fill.len());
    for node in nodes {
        match node {
            Node::Hole => out.extend_from_slice(fill),
            Node::Tree { label, children } => out.push(Node::Tree {
                label: label.clone(),
                children: substitute(children, fill),
            }),
        }
    }
    out
}

fn collect_labels<'a>(nodes: &'a [Node], out: &mut Vec<&'a Label>) {
    for node in nodes {
        if let Node::Tree { label, children } = node {
            out.push(label);
            collect_labels(children, out);
        }
    }
}

/// A forest: an ordered sequence of trees, with `0` the empty sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Forest {
    roots: Vec<Node>,
}

impl Forest {
    pub fn empty() -> Self {
        Forest { roots: Vec::new() }
    }

    pub fn leaf(label: &str) -> Self {
        Self::tree(label, Forest::empty())
    }

    pub fn tree(label: &str, children: Forest) -> Self {
        Forest {
            roots: vec![Node::Tree {
                label: Label::from(label),
                children: children.roots,
            }],
        }
    }

    /// Builds a forest from raw nodes, rejecting any hole.
    pub fn from_nodes(roots: Vec<Node>) -> Result<Self, TermError> {
        match count_holes(&roots) {
            0 => Ok(Forest { roots }),
            n => Err(TermError::HoleCount(n)),
        }
    }

    pub fn roots(&self) -> &[Node] {
        &self.roots
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn node_count(&self) -> usize {
        count_nodes(&self.roots)
    }

    pub fn concat(&self, other: &Forest) -> Forest {
        let mut roots = self.roots.clone();
        roots.extend_from_slice(&other.roots);
        Forest { roots }
    }

    /// The trees of this forest, each as a one-tree forest.
    pub fn trees(&self) -> impl Iterator<Item = Forest> + '_ {
        self.roots.iter().map(|n| Forest {
            roots: vec![n.clone()],
        })
    }

    pub fn labels(&self) -> Vec<&Label> {
        let mut out = Vec::new();
        collect_labels(&self.roots, &mut out);
        out
    }
}

/// A context: a forest with exactly one hole leaf.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context {
    roots: Vec<Node>,
}

impl Default for Context {
    fn default() -> Self {
        Self::hole()
    }
}

impl Context {
    /// The empty context `[]`.
    pub fn hole() -> Self {
        Context {
            roots: vec![Node::Hole],
        }
    }

    /// `a([])`.
    pub fn letter(label: &str) -> Self {
        Context {
            roots: vec![Node::Tree {
                label: Label::from(label),
                children: vec![Node::Hole],
            }],
        }
    }

    /// `t+[]`.
    pub fn insert_left(t: &Forest) -> Self {
        let mut roots = t.roots.clone();
        roots.push(Node::Hole);
        Context { roots }
    }

    /// `[]+t`.
    pub fn insert_right(t: &Forest) -> Self {
        let mut roots = vec![Node::Hole];
        roots.extend_from_slice(&t.roots);
        Context { roots }
    }

    pub fn from_nodes(roots: Vec<Node>) -> Result<Self, TermError> {
        match count_holes(&roots) {
            1 => Ok(Context { roots }),
            n => Err(TermError::HoleCount(n)),
        }
    }

    pub fn roots(&self) -> &[Node] {
        &self.roots
    }

    pub fn node_count(&self) -> usize {
        count_nodes(&self.roots)
    }

    pub fn is_hole(&self) -> bool {
        matches!(self.roots.as_slice(), [Node::Hole])
    }

    /// Fills the hole with `s`.
    pub fn apply(&self, s: &Forest) -> Forest {
        Forest {
            roots: substitute(&self.roots, &s.roots),
        }
    }

    /// The context `self ∘ inner`: the hole of `self` is replaced by `inner`.
    pub fn compose(&self, inner: &Context) -> Context {
        Context {
            roots: substitute(&self.roots, &inner.roots),
        }
    }

    /// `self` composed with itself `n` times; `[]` for `n = 0`.
    pub fn power(&self, n: usize) -> Context {
        (0..n).fold(Context::hole(), |acc, _| acc.compose(self))
    }

    pub fn labels(&self) -> Vec<&Label> {
        let mut out = Vec::new();
        collect_labels(&self.roots, &mut out);
        out
    }
}

/// Either kind of term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Forest(Forest),
    Context(Context),
}

impl Term {
    pub fn kind(&self) -> TermKind {
        match self {
            Term::Forest(_) => TermKind::Forest,
            Term::Context(_) => TermKind::Context,
        }
    }

    pub fn roots(&self) -> &[Node] {
        match self {
            Term::Forest(f) => f.roots(),
            Term::Context(c) => c.roots(),
        }
    }

    pub fn node_count(&self) -> usize {
        count_nodes(self.roots())
    }

    pub fn as_forest(&self) -> Option<&Forest> {
        match self {
            Term::Forest(f) => Some(f),
            Term::Context(_) => None,
        }
    }

    pub fn as_context(&self) -> Option<&Context> {
        match self {
            Term::Context(c) => Some(c),
            Term::Forest(_) => None,
        }
    }

    /// Rebuilds a term of the same kind from new roots. Callers keep the hole count.
    pub(crate) fn with_roots(&self, roots: Vec<Node>) -> Term {
        match self {
            Term::Forest(_) => Term::Forest(Forest { roots }),
            Term::Context(_) => Term::Context(Context { roots }),
        }
    }
}

impl From<Forest> for Term {
    fn from(f: Forest) -> Self {
        Term::Forest(f)
    }
}

impl From<Context> for Term {
    fn from(c: Context) -> Self {
        Term::Context(c)
    }
}

pub fn apply_context(p: &Context, s: &Forest) -> Forest {
    p.apply(s)
}

pub fn compose_contexts(q: &Context, p: &Context) -> Context {
    q.compose(p)
}

pub fn concat_forests(s: &Forest, t: &Forest) -> Forest {
    s.concat(t)
}

pub fn render_term(term: &Term) -> String {
    term.to_string()
}

fn write_nodes(f: &mut fmt::Formatter<'_>, nodes: &[Node]) -> fmt::Result {
    if nodes.is_empty() {
        return f.write_str("0");
    }
    for (i, node) in nodes.iter().enumerate() {
        if i > 0 {
            f.write_str("+")?;
        }
        match node {
            Node::Hole => f.write_str("[]")?,
            Node::Tree { label, children } => {
                f.write_str(label)?;
                if !children.is_empty() {
                    f.write_str("(")?;
                    write_nodes(f, children)?;
                    f.write_str(")")?;
                }
            }
        }
    }
    Ok(())
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_nodes(f, &self.roots)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_nodes(f, &self.roots)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_nodes(f, self.roots())
    }
}
