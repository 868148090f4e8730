//! Finite monoids and forest algebras, the transition-algebra construction
//! from automaton specifications, and evaluation of terms.

mod forest;
mod monoid;
mod morphism;
mod spec;

use thiserror::Error;

use crate::term::TermError;

pub use forest::{validate_axioms, AxiomReport, AxiomViolation, ForestAlgebra};
pub use monoid::{omega_power, FiniteMonoid, MonoidSpec};
pub use morphism::{Morphism, Recognizer};
pub use spec::{
    build_transition_algebra, build_transition_algebra_with_limit, close_transformations,
    AutomatonSpec, DEFAULT_V_LIMIT,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("invalid monoid: {0}")]
    InvalidMonoid(String),
    #[error("invalid forest algebra: {0}")]
    InvalidAlgebra(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("invalid automaton specification: {0}")]
    SpecInvalid(String),
    #[error("context monoid exceeds the limit of {limit} elements")]
    SizeLimitExceeded { limit: usize },
    #[error("label `{0}` is not in the alphabet")]
    AlphabetMismatch(String),
    #[error(transparent)]
    Term(#[from] TermError),
}
