//! Formula syntax:
//!
//! ```text
//! formula := "E" VAR formula | "A" VAR formula | implies
//! implies := or ["->" formula]
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | "E" VAR formula | "A" VAR formula | atom
//! atom    := "(" formula ")" | "true" | "false" | LABEL "(" VAR ")"
//!          | VAR ("<" | "<lex" | "<=" | "=") VAR
//! ```
//!
//! A quantifier's scope extends as far right as possible. `E` and `A` are
//! reserved and cannot be labels or variables.

use super::{Formula, LogicError};
use crate::term::Label;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T, LogicError> {
        Err(LogicError::Syntax {
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

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            Some(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
        } else {
            None
        }
    }

    fn peek_ident(&mut self) -> Option<String> {
        let save = self.pos;
        let id = self.ident();
        self.pos = save;
        id
    }

    fn variable(&mut self) -> Result<String, LogicError> {
        match self.ident() {
            Some(v) if v != "E" && v != "A" => Ok(v),
            _ => self.error("expected a variable"),
        }
    }

    fn formula(&mut self) -> Result<Formula, LogicError> {
        let left = self.or()?;
        if self.eat("->") {
            let right = self.formula()?;
            return Ok(Formula::or(Formula::not(left), right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula, LogicError> {
        let mut f = self.and()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            f = Formula::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula, LogicError> {
        let mut f = self.unary()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        if self.peek() == Some(b'!') {
            self.pos += 1;
            return Ok(Formula::not(self.unary()?));
        }
        match self.peek_ident().as_deref() {
            Some("E") | Some("A") => {
                let q = self.ident().unwrap();
                let x = self.variable()?;
                let body = self.formula()?;
                Ok(if q == "E" {
                    Formula::Exists(x, Box::new(body))
                } else {
                    Formula::Forall(x, Box::new(body))
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, LogicError> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let f = self.formula()?;
            if !self.eat(")") {
                return self.error("expected `)`");
            }
            return Ok(f);
        }
        let Some(name) = self.ident() else {
            return if self.peek().is_none() {
                self.error("unexpected end of input")
            } else {
                self.error("expected an atom")
            };
        };
        match name.as_str() {
            "true" => return Ok(Formula::True),
            "false" => return Ok(Formula::False),
            "E" | "A" => return self.error("quantifier in atom position"),
            _ => {}
        }
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let x = self.variable()?;
            if !self.eat(")") {
                return self.error("expected `)`");
            }
            return Ok(Formula::Label(Label::from(name.as_str()), x));
        }
        if self.eat("<lex") {
            return Ok(Formula::Lex(name, self.variable()?));
        }
        if self.eat("<=") {
            return Ok(Formula::le(&name, &self.variable()?));
        }
        if self.eat("<") {
            return Ok(Formula::Less(name, self.variable()?));
        }
        if self.eat("=") {
            return Ok(Formula::Eq(name, self.variable()?));
        }
        self.error("expected `(`, `<`, `<lex`, `<=` or `=`")
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, LogicError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let f = p.formula()?;
    if p.peek().is_some() {
        return p.error("trailing input");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_and_connectives() {
        let f = parse_formula("a(x) & x<y | !(x=y)").unwrap();
        assert_eq!(
            f,
            Formula::or(
                Formula::and(
                    Formula::Label("a".into(), "x".into()),
                    Formula::Less("x".into(), "y".into())
                ),
                Formula::not(Formula::Eq("x".into(), "y".into()))
            )
        );
        assert_eq!(
            parse_formula("x<lex y").unwrap(),
            Formula::Lex("x".into(), "y".into())
        );
        assert_eq!(parse_formula("x<=y").unwrap(), Formula::le("x", "y"));
    }

    #[test]
    fn quantifier_scope_is_greedy() {
        let f = parse_formula("E x a(x) & b(x)").unwrap();
        assert!(matches!(f, Formula::Exists(_, ref body) if matches!(**body, Formula::And(..))));
    }

    #[test]
    fn implication_is_sugar() {
        assert_eq!(
            parse_formula("a(x) -> b(x)").unwrap(),
            Formula::or(
                Formula::not(Formula::Label("a".into(), "x".into())),
                Formula::Label("b".into(), "x".into())
            )
        );
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_formula("E x"),
            Err(LogicError::Syntax { .. })
        ));
        assert!(matches!(
            parse_formula("a(x"),
            Err(LogicError::Syntax { .. })
        ));
        assert!(matches!(parse_formula("x"), Err(LogicError::Syntax { .. })));
        assert!(matches!(
            parse_formula("E A a(A)"),
            Err(LogicError::Syntax { .. })
        ));
        assert!(matches!(
            parse_formula("a(x) b(x)"),
            Err(LogicError::Syntax { position: 5, .. })
        ));
    }
}
