//! Signatures, terms, concrete syntax and signed generation trees.

pub mod parse;
mod print;
pub mod signature;
pub mod signed;
pub mod term;

pub use parse::{parse, parse_inequality, parse_quasi, parse_term, ParseError, Parsed};
pub use signature::{
    residual_name, ConnRef, Connective, Declaration, Family, OrderType, Origin, Polarity, Signature, SignatureError,
};
pub use signed::{NodeId, Sign, SignedNode, SignedTree};
pub use term::{fresh_fpvar, BinderKind, Inequality, Language, Path, Positivity, QuasiInequality, Term, TermError, Var};
