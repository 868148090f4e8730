//! Decision procedures for first-order definability with one quantifier
//! alternation on regular forest languages.

pub mod algebra;
pub mod cli;
pub mod corpus;
pub mod decide;
pub mod logic;
pub mod pieces;
pub mod syntactic;
pub mod term;
pub mod word;
