//! Finite normal lattice expansions used as a brute-force semantic oracle.

pub mod corpus;
pub mod eval;
pub mod lattice;
pub mod le;

pub use corpus::{enumerate_les, seed_from_env, AlgebraFile, CorpusConfig};
pub use eval::{
    check_inequality, check_quasi, check_targeted_preservation, evaluate, evaluate_with, Assignment, Compiled,
    Counterexample, EvalError, Route, Validity,
};
pub use lattice::{catalog, Elem, FiniteLattice, LatticeDescription, LatticeError};
pub use le::{AlgebraError, FiniteLE, OpTable};
