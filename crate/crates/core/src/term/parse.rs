//! Recursive-descent parser for the term grammar:
//!
//! ```text
//! Forest := "0" | Item ("+" Item)*
//! Item   := "[]" | LABEL [ "(" Forest ")" ]
//! LABEL  := [A-Za-z][A-Za-z0-9_]*
//! ```
//!
//! Whitespace between tokens is ignored.

use super::{count_holes, Alphabet, Context, Forest, Label, Node, Term, TermError, TermKind};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    alphabet: Option<&'a Alphabet>,
}

impl<'a> Parser<'a> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T, TermError> {
        Err(TermError::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, byte: u8) -> Result<(), TermError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected `{}`", byte as char))
        }
    }

    fn forest(&mut self) -> Result<Vec<Node>, TermError> {
        if self.peek() == Some(b'0') {
            self.pos += 1;
            return Ok(Vec::new());
        }
        let mut nodes = vec![self.item()?];
        while self.peek() == Some(b'+') {
            self.pos += 1;
            nodes.push(self.item()?);
        }
        Ok(nodes)
    }

    fn item(&mut self) -> Result<Node, TermError> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                self.expect(b']')?;
                Ok(Node::Hole)
            }
            Some(b) if b.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                // The slice is ASCII by construction.
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if let Some(alphabet) = self.alphabet {
                    if !alphabet.contains(name) {
                        return Err(TermError::UnknownLabel(name.to_string()));
                    }
                }
                let children = if self.peek() == Some(b'(') {
                    self.pos += 1;
                    let children = self.forest()?;
                    self.expect(b')')?;
                    children
                } else {
                    Vec::new()
                };
                Ok(Node::Tree {
                    label: Label::from(name),
                    children,
                })
            }
            Some(_) => self.error("expected a label, `[]` or `0`"),
            None => self.error("unexpected end of input"),
        }
    }
}

fn parse_nodes(text: &str, alphabet: Option<&Alphabet>) -> Result<Vec<Node>, TermError> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
        alphabet,
    };
    let nodes = parser.forest()?;
    if parser.peek().is_some() {
        return parser.error("trailing input");
    }
    Ok(nodes)
}

/// Parses a forest. Labels are checked against `alphabet` when one is given.
pub fn parse_forest(text: &str, alphabet: Option<&Alphabet>) -> Result<Forest, TermError> {
    let nodes = parse_nodes(text, alphabet)?;
    match count_holes(&nodes) {
        0 => Ok(Forest { roots: nodes }),
        n => Err(TermError::HoleCount(n)),
    }
}

pub fn parse_context(text: &str, alphabet: Option<&Alphabet>) -> Result<Context, TermError> {
    let nodes = parse_nodes(text, alphabet)?;
    match count_holes(&nodes) {
        1 => Ok(Context { roots: nodes }),
        n => Err(TermError::HoleCount(n)),
    }
}

pub fn parse_term(
    text: &str,
    alphabet: Option<&Alphabet>,
    kind: TermKind,
) -> Result<Term, TermError> {
    match kind {
        TermKind::Forest => parse_forest(text, alphabet).map(Term::Forest),
        TermKind::Context => parse_context(text, alphabet).map(Term::Context),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_forest_literal() {
        let ab = Alphabet::new(["a"]);
        assert_eq!(parse_forest("0", Some(&ab)).unwrap(), Forest::empty());
    }

    #[test]
    fn nested_forest() {
        let abc = Alphabet::new(["a", "b", "c"]);
        let t = parse_forest("a(b+c)", Some(&abc)).unwrap();
        assert_eq!(
            t,
            Forest::tree("a", Forest::leaf("b").concat(&Forest::leaf("c")))
        );
    }

    #[test]
    fn context_with_sibling() {
        let ab = Alphabet::new(["a", "b"]);
        let p = parse_context("a([])+b", Some(&ab)).unwrap();
        assert_eq!(
            p,
            Context::insert_right(&Forest::leaf("b")).compose(&Context::letter("a"))
        );
        assert_eq!(p.to_string(), "a([])+b");
        assert_eq!(p.apply(&Forest::leaf("a")).to_string(), "a(a)+b");
    }

    #[test]
    fn whitespace_and_explicit_empty_children() {
        let t = parse_forest(" a ( 0 ) + b ( c ) ", None).unwrap();
        assert_eq!(t.to_string(), "a+b(c)");
    }

    #[test]
    fn errors() {
        let ab = Alphabet::new(["a", "b"]);
        assert_eq!(
            parse_forest("a+c", Some(&ab)),
            Err(TermError::UnknownLabel("c".into()))
        );
        assert_eq!(
            parse_context("a(b)", Some(&ab)),
            Err(TermError::HoleCount(0))
        );
        assert_eq!(
            parse_context("[]+[]", Some(&ab)),
            Err(TermError::HoleCount(2))
        );
        assert_eq!(
            parse_forest("a([])", Some(&ab)),
            Err(TermError::HoleCount(1))
        );
        assert!(matches!(
            parse_forest("a(b", Some(&ab)),
            Err(TermError::Syntax { position: 3, .. })
        ));
        assert!(matches!(
            parse_forest("a b", None),
            Err(TermError::Syntax { position: 2, .. })
        ));
        assert!(matches!(
            parse_forest("", None),
            Err(TermError::Syntax { .. })
        ));
        assert!(matches!(
            parse_forest("0+a", None),
            Err(TermError::Syntax { .. })
        ));
        assert!(matches!(
            parse_forest("a+", None),
            Err(TermError::Syntax { .. })
        ));
    }

    #[test]
    fn multi_character_labels() {
        let t = parse_forest("node_1(leaf2)", None).unwrap();
        assert_eq!(t.node_count(), 2);
        assert_eq!(t.to_string(), "node_1(leaf2)");
    }
}
