//! The reduction engine: preprocessing, the Stage 2 rules, runs and traces.

pub mod preprocess;
pub mod rules;
pub mod run;
pub mod shape;
pub mod step;
pub mod system;
pub mod trace;

pub use preprocess::{preprocess, preprocess_traced};
pub use rules::{
    ackermann_left, ackermann_right, approximate, extraction_points, invert_residuation, residuate, split_member,
    EngineError, Extraction,
};
pub use run::{choose_witness, run, run_system, Mode, RunConfig, RunOutcome, Stuck, SystemRun};
pub use shape::{syntactic_shape, ShapeError, SyntacticShape};
pub use step::{DerivationStep, Position, Rule, Side};
pub use system::System;
pub use trace::{replay, Trace};
