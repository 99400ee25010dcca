//! Symbolic workbench for lattice-based fixed point inequalities: syntactic
//! classification, the constructive μ*-ALBA reduction, and a brute-force
//! finite-algebra oracle that checks every rewrite.

pub mod algebra;
pub mod classifier;
pub mod engine;
pub mod gen;
pub mod par;
pub mod selftest;
pub mod syntax;
pub mod verify;
