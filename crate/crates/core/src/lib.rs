//! Regular languages, their syntactic semigroups, and pseudoidentity checks
//! over finite semigroups.

pub mod alphabet;
pub mod check;
pub mod content;
pub mod corpus;
pub mod dfa;
pub mod embedding;
pub mod eval;
pub mod local;
pub mod nonlocality;
pub mod regex;
pub mod semigroup;
pub mod term;
pub mod variety;
