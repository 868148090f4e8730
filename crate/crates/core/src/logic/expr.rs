//! Expressions over forest and context languages built from piece-closed
//! bases, `{a□}` and `{□}`, and membership by decomposition search.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::term::{
    enumerate_terms, is_piece_term, pieces_of, Alphabet, Label, Node, Term, TermError, TermKind,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("expected a {expected:?} expression, found a {found:?} one")]
    KindMismatch { expected: TermKind, found: TermKind },
    #[error("base language is not closed under pieces: {member} is a member but its piece {piece} is not")]
    NotPieceClosed { member: String, piece: String },
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sigma2Expr {
    /// Terms of the given kind with none of `forbidden` as a piece.
    PieceClosed {
        kind: TermKind,
        forbidden: Vec<Term>,
    },
    /// `{a□}`.
    Letter(Label),
    /// `{□}`.
    Hole,
    /// `K·K'`.
    Compose(Box<Sigma2Expr>, Box<Sigma2Expr>),
    /// `K·L`.
    Apply(Box<Sigma2Expr>, Box<Sigma2Expr>),
    /// `L+L'`.
    Plus(Box<Sigma2Expr>, Box<Sigma2Expr>),
    Union(Box<Sigma2Expr>, Box<Sigma2Expr>),
    Intersect(Box<Sigma2Expr>, Box<Sigma2Expr>),
}

fn expect(kind: TermKind, e: &Sigma2Expr) -> Result<(), ExprError> {
    let found = e.kind()?;
    if found == kind {
        Ok(())
    } else {
        Err(ExprError::KindMismatch {
            expected: kind,
            found,
        })
    }
}

impl Sigma2Expr {
    pub fn all(kind: TermKind) -> Self {
        Sigma2Expr::PieceClosed {
            kind,
            forbidden: Vec::new(),
        }
    }

    pub fn avoiding(kind: TermKind, forbidden: Vec<Term>) -> Result<Self, ExprError> {
        if let Some(t) = forbidden.iter().find(|t| t.kind() != kind) {
            return Err(ExprError::KindMismatch {
                expected: kind,
                found: t.kind(),
            });
        }
        Ok(Sigma2Expr::PieceClosed { kind, forbidden })
    }

    pub fn letter(a: &str) -> Self {
        Sigma2Expr::Letter(Label::from(a))
    }

    pub fn compose(k: Sigma2Expr, k2: Sigma2Expr) -> Result<Self, ExprError> {
        expect(TermKind::Context, &k)?;
        expect(TermKind::Context, &k2)?;
        Ok(Sigma2Expr::Compose(Box::new(k), Box::new(k2)))
    }

    pub fn apply(k: Sigma2Expr, l: Sigma2Expr) -> Result<Self, ExprError> {
        expect(TermKind::Context, &k)?;
        expect(TermKind::Forest, &l)?;
        Ok(Sigma2Expr::Apply(Box::new(k), Box::new(l)))
    }

    pub fn plus(l: Sigma2Expr, l2: Sigma2Expr) -> Result<Self, ExprError> {
        expect(TermKind::Forest, &l)?;
        expect(TermKind::Forest, &l2)?;
        Ok(Sigma2Expr::Plus(Box::new(l), Box::new(l2)))
    }

    pub fn union(a: Sigma2Expr, b: Sigma2Expr) -> Result<Self, ExprError> {
        expect(a.kind()?, &b)?;
        Ok(Sigma2Expr::Union(Box::new(a), Box::new(b)))
    }

    pub fn intersect(a: Sigma2Expr, b: Sigma2Expr) -> Result<Self, ExprError> {
        expect(a.kind()?, &b)?;
        Ok(Sigma2Expr::Intersect(Box::new(a), Box::new(b)))
    }

    /// The kind of terms the expression denotes, checking every combinator.
    pub fn kind(&self) -> Result<TermKind, ExprError> {
        match self {
            Sigma2Expr::PieceClosed { kind, forbidden } => {
                if let Some(t) = forbidden.iter().find(|t| t.kind() != *kind) {
                    return Err(ExprError::KindMismatch {
                        expected: *kind,
                        found: t.kind(),
                    });
                }
                Ok(*kind)
            }
            Sigma2Expr::Letter(_) | Sigma2Expr::Hole => Ok(TermKind::Context),
            Sigma2Expr::Compose(a, b) => {
                expect(TermKind::Context, a)?;
                expect(TermKind::Context, b)?;
                Ok(TermKind::Context)
            }
            Sigma2Expr::Apply(a, b) => {
                expect(TermKind::Context, a)?;
                expect(TermKind::Forest, b)?;
                Ok(TermKind::Forest)
            }
            Sigma2Expr::Plus(a, b) => {
                expect(TermKind::Forest, a)?;
                expect(TermKind::Forest, b)?;
                Ok(TermKind::Forest)
            }
            Sigma2Expr::Union(a, b) | Sigma2Expr::Intersect(a, b) => {
                let k = a.kind()?;
                expect(k, b)?;
                Ok(k)
            }
        }
    }

    /// Checks every piece-closed base on all terms of at most `max_nodes`
    /// nodes: the pieces of a member must be members.
    pub fn validate(&self, alphabet: &Alphabet, max_nodes: usize) -> Result<(), ExprError> {
        self.kind()?;
        match self {
            Sigma2Expr::PieceClosed { kind, forbidden } => {
                for t in enumerate_terms(alphabet, max_nodes, *kind) {
                    if !avoids(forbidden, &t)? {
                        continue;
                    }
                    for s in pieces_of(&t) {
                        if !avoids(forbidden, &s)? {
                            return Err(ExprError::NotPieceClosed {
                                member: t.to_string(),
                                piece: s.to_string(),
                            });
                        }
                    }
                }
                Ok(())
            }
            Sigma2Expr::Letter(_) | Sigma2Expr::Hole => Ok(()),
            Sigma2Expr::Compose(a, b)
            | Sigma2Expr::Apply(a, b)
            | Sigma2Expr::Plus(a, b)
            | Sigma2Expr::Union(a, b)
            | Sigma2Expr::Intersect(a, b) => {
                a.validate(alphabet, max_nodes)?;
                b.validate(alphabet, max_nodes)
            }
        }
    }
}

impl fmt::Display for Sigma2Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma2Expr::PieceClosed { kind, forbidden } => {
                let k = if *kind == TermKind::Forest { "F" } else { "C" };
                let items: Vec<String> = forbidden.iter().map(|t| t.to_string()).collect();
                write!(f, "{k}\\{{{}}}", items.join(", "))
            }
            Sigma2Expr::Letter(a) => write!(f, "{{{a}([])}}"),
            Sigma2Expr::Hole => write!(f, "{{[]}}"),
            Sigma2Expr::Compose(a, b) | Sigma2Expr::Apply(a, b) => write!(f, "({a}).({b})"),
            Sigma2Expr::Plus(a, b) => write!(f, "({a}) + ({b})"),
            Sigma2Expr::Union(a, b) => write!(f, "({a}) | ({b})"),
            Sigma2Expr::Intersect(a, b) => write!(f, "({a}) & ({b})"),
        }
    }
}

fn avoids(forbidden: &[Term], t: &Term) -> Result<bool, ExprError> {
    for f in forbidden {
        if is_piece_term(f, t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn hole_index(nodes: &[Node]) -> Option<usize> {
    nodes.iter().position(|n| n.hole_count() > 0)
}

fn replace_children(nodes: &[Node], k: usize, children: Vec<Node>) -> Vec<Node> {
    let mut out = nodes.to_vec();
    if let Node::Tree { label, .. } = &nodes[k] {
        out[k] = Node::Tree {
            label: label.clone(),
            children,
        };
    }
    out
}

/// Every way to write a forest as `q·s`: a contiguous run of some sibling
/// sequence becomes `s` and is replaced by the hole in `q`.
fn apply_splits(nodes: &[Node]) -> Vec<(Vec<Node>, Vec<Node>)> {
    let mut out = Vec::new();
    for i in 0..=nodes.len() {
        for j in i..=nodes.len() {
            let mut q = nodes[..i].to_vec();
            q.push(Node::Hole);
            q.extend_from_slice(&nodes[j..]);
            out.push((q, nodes[i..j].to_vec()));
        }
    }
    for (k, node) in nodes.iter().enumerate() {
        if let Node::Tree { children, .. } = node {
            for (q, s) in apply_splits(children) {
                out.push((replace_children(nodes, k, q), s));
            }
        }
    }
    out
}

/// Every way to write a context as `q·q'`: `q'` is a contiguous run of a
/// sibling sequence on the path to the hole, containing the hole.
fn compose_splits(nodes: &[Node]) -> Vec<(Vec<Node>, Vec<Node>)> {
    let mut out = Vec::new();
    let Some(k) = hole_index(nodes) else {
        return out;
    };
    for i in 0..=k {
        for j in k + 1..=nodes.len() {
            let mut q = nodes[..i].to_vec();
            q.push(Node::Hole);
            q.extend_from_slice(&nodes[j..]);
            out.push((q, nodes[i..j].to_vec()));
        }
    }
    if let Node::Tree { children, .. } = &nodes[k] {
        for (q, inner) in compose_splits(children) {
            out.push((replace_children(nodes, k, q), inner));
        }
    }
    out
}

struct Matcher<'e> {
    /// Sub-expressions in pre-order; the memo is keyed by position.
    nodes: Vec<&'e Sigma2Expr>,
    ids: HashMap<*const Sigma2Expr, usize>,
    memo: HashMap<(usize, Vec<Node>), bool>,
}

impl<'e> Matcher<'e> {
    fn new(root: &'e Sigma2Expr) -> Self {
        let mut m = Matcher {
            nodes: Vec::new(),
            ids: HashMap::new(),
            memo: HashMap::new(),
        };
        m.register(root);
        m
    }

    fn register(&mut self, e: &'e Sigma2Expr) {
        self.ids.insert(e as *const _, self.nodes.len());
        self.nodes.push(e);
        match e {
            Sigma2Expr::Compose(a, b)
            | Sigma2Expr::Apply(a, b)
            | Sigma2Expr::Plus(a, b)
            | Sigma2Expr::Union(a, b)
            | Sigma2Expr::Intersect(a, b) => {
                self.register(a);
                self.register(b);
            }
            _ => {}
        }
    }

    fn member(&mut self, e: &'e Sigma2Expr, t: &[Node]) -> Result<bool, ExprError> {
        let key = (self.ids[&(e as *const _)], t.to_vec());
        if let Some(&r) = self.memo.get(&key) {
            return Ok(r);
        }
        let r = match e {
            Sigma2Expr::PieceClosed { kind, forbidden } => {
                let term = match kind {
                    TermKind::Forest => Term::Forest(crate::term::Forest::from_nodes(t.to_vec())?),
                    TermKind::Context => {
                        Term::Context(crate::term::Context::from_nodes(t.to_vec())?)
                    }
                };
                avoids(forbidden, &term)?
            }
            Sigma2Expr::Letter(a) => {
                matches!(t, [Node::Tree { label, children }] if label == a && matches!(children.as_slice(), [Node::Hole]))
            }
            Sigma2Expr::Hole => matches!(t, [Node::Hole]),
            Sigma2Expr::Compose(k, k2) => {
                let mut found = false;
                for (q, inner) in compose_splits(t) {
                    if self.member(k, &q)? && self.member(k2, &inner)? {
                        found = true;
                        break;
                    }
                }
                found
            }
            Sigma2Expr::Apply(k, l) => {
                let mut found = false;
                for (q, s) in apply_splits(t) {
                    if self.member(k, &q)? && self.member(l, &s)? {
                        found = true;
                        break;
                    }
                }
                found
            }
            Sigma2Expr::Plus(l, l2) => {
                let mut found = false;
                for i in 0..=t.len() {
                    if self.member(l, &t[..i])? && self.member(l2, &t[i..])? {
                        found = true;
                        break;
                    }
                }
                found
            }
            Sigma2Expr::Union(a, b) => self.member(a, t)? || self.member(b, t)?,
            Sigma2Expr::Intersect(a, b) => self.member(a, t)? && self.member(b, t)?,
        };
        self.memo.insert(key, r);
        Ok(r)
    }
}

/// Decides `t ∈ e`.
pub fn expr_member(e: &Sigma2Expr, t: &Term) -> Result<bool, ExprError> {
    expect(t.kind(), e)?;
    Matcher::new(e).member(e, t.roots())
}
