//! The definability test: the identity `v^ω w v^ω = v^ω` for `w ⪯ v`,
//! plus horizontal commutativity when the lexicographic order is absent.

mod counterexample;
mod structure;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::algebra::{ForestAlgebra, Recognizer};
use crate::pieces::{compute_pieces, PieceRelation, WitnessTable};
use crate::syntactic::{restrict_reachable, syntactic_quotient};

pub use counterexample::{exhaustive_search, semantic_counterexample, Lifted, SearchBounds};
pub use structure::{
    check_piece_subalgebra, check_stabilizer_classes, check_stabilizer_piece_closure, h_bottom,
    reachability_classes, stabilizer, LemmaViolation, Reachability,
};

/// Which signature the formulas may use: the descendant order alone, or
/// the descendant order together with the lexicographic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Desc,
    Lex,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::Desc => "desc",
            Order::Lex => "lex",
        })
    }
}

impl FromStr for Order {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "desc" => Ok(Order::Desc),
            "lex" => Ok(Order::Lex),
            other => Err(format!("unknown order `{other}`, expected desc or lex")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `w ⪯ v` and `v^ω w v^ω ≠ v^ω`.
    Identity { v: usize, w: usize },
    /// `g + h ≠ h + g`.
    Commutativity { g: usize, h: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub definable: bool,
    pub order: Order,
    pub witness: Option<Witness>,
    pub lifted: Option<Lifted>,
    pub warnings: Vec<String>,
}

/// The first `(v, w)` in canonical order with `w ⪯ v` and
/// `v^ω w v^ω ≠ v^ω`.
pub fn find_identity_violation(alg: &ForestAlgebra, rel: &PieceRelation) -> Option<(usize, usize)> {
    for v in alg.v().elements() {
        let e = alg.v().omega(v);
        for w in alg.v().elements() {
            if rel.v_le(w, v) && alg.compose(alg.compose(e, w), e) != e {
                return Some((v, w));
            }
        }
    }
    None
}

/// The first `g < h` with `g + h ≠ h + g`.
pub fn find_commutativity_violation(alg: &ForestAlgebra) -> Option<(usize, usize)> {
    for g in alg.h().elements() {
        for h in g + 1..alg.h_len() {
            if alg.plus(g, h) != alg.plus(h, g) {
                return Some((g, h));
            }
        }
    }
    None
}

pub fn check_delta2(alg: &ForestAlgebra, rel: &PieceRelation, order: Order) -> Verdict {
    let witness = match find_identity_violation(alg, rel) {
        Some((v, w)) => Some(Witness::Identity { v, w }),
        None if order == Order::Desc => {
            find_commutativity_violation(alg).map(|(g, h)| Witness::Commutativity { g, h })
        }
        None => None,
    };
    Verdict {
        definable: witness.is_none(),
        order,
        witness,
        lifted: None,
        warnings: Vec::new(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub minimize: bool,
    pub transitive_pieces: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            minimize: true,
            transitive_pieces: false,
        }
    }
}

/// Everything the decision procedure derives from a recognizer: the
/// algebra actually analysed (normally the syntactic one), its piece
/// relation and witness terms.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub recognizer: Recognizer,
    pub pieces: PieceRelation,
    pub witnesses: WitnessTable,
    pub minimized: bool,
    pub warnings: Vec<String>,
}

impl Analysis {
    pub fn new(input: &Recognizer, options: Options) -> Self {
        let restricted = restrict_reachable(input).recognizer;
        let quotient = syntactic_quotient(&restricted)
            .expect("restricted")
            .quotient;
        let mut warnings = Vec::new();
        let recognizer = if options.minimize {
            quotient
        } else {
            let msg =
                "minimization skipped: the identity is only meaningful on the syntactic algebra";
            log::warn!("{msg}");
            warnings.push(msg.to_string());
            if quotient.algebra().h_len() != restricted.algebra().h_len()
                || quotient.algebra().v_len() != restricted.algebra().v_len()
            {
                let msg = "input algebra is not syntactic; a positive verdict may be wrong";
                log::warn!("{msg}");
                warnings.push(msg.to_string());
            }
            restricted
        };
        let pieces = compute_pieces(&recognizer, options.transitive_pieces);
        let witnesses = WitnessTable::build(&recognizer);
        Analysis {
            recognizer,
            pieces,
            witnesses,
            minimized: options.minimize,
            warnings,
        }
    }

    pub fn algebra(&self) -> &ForestAlgebra {
        self.recognizer.algebra()
    }

    pub fn decide(&self, order: Order) -> Verdict {
        let mut verdict = check_delta2(self.algebra(), &self.pieces, order);
        verdict.warnings = self.warnings.clone();
        verdict
    }

    /// Decides and, for an identity violation, searches for a concrete
    /// counterexample within `bounds`.
    pub fn decide_and_lift(&self, order: Order, bounds: SearchBounds) -> Verdict {
        let mut verdict = self.decide(order);
        if let Some(Witness::Identity { v, w }) = verdict.witness {
            verdict.lifted = semantic_counterexample(self, v, w, bounds);
        }
        verdict
    }
}
