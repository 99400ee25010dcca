//! Oracle checks of reductions: input/output equivalence and per-step soundness
//! on a corpus of finite lattice expansions.

use serde::Serialize;

use crate::algebra::{check_quasi, Counterexample, EvalError, FiniteLE, Validity};
use crate::engine::{DerivationStep, RunOutcome, System};
use crate::par::{self, Exec};
use crate::syntax::{Inequality, QuasiInequality};

/// First counterexample to any member of the list, or `Valid`.
pub fn validity_of_all(le: &FiniteLE, qs: &[QuasiInequality]) -> Result<Validity, EvalError> {
    for q in qs {
        let v = check_quasi(le, q)?;
        if !v.is_valid() {
            return Ok(v);
        }
    }
    Ok(Validity::Valid)
}

/// One algebra on which the two sides disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub algebra: String,
    pub before_valid: bool,
    pub after_valid: bool,
    /// Falsifies whichever side is invalid.
    pub counterexample: Counterexample,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub algebras: usize,
    pub discrepancies: Vec<Discrepancy>,
}

impl EquivalenceReport {
    pub fn is_equivalent(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

fn compare(le: &FiniteLE, before: &[QuasiInequality], after: &[QuasiInequality]) -> Result<Option<Discrepancy>, EvalError> {
    let b = validity_of_all(le, before)?;
    let a = validity_of_all(le, after)?;
    Ok(match (b, a) {
        (Validity::Valid, Validity::Invalid(cx)) => {
            Some(Discrepancy { algebra: le.name.clone(), before_valid: true, after_valid: false, counterexample: cx })
        }
        (Validity::Invalid(cx), Validity::Valid) => {
            Some(Discrepancy { algebra: le.name.clone(), before_valid: false, after_valid: true, counterexample: cx })
        }
        _ => None,
    })
}

/// Validity-equivalence of two lists of quasi-inequalities on every algebra.
pub fn check_equivalent(
    before: &[QuasiInequality],
    after: &[QuasiInequality],
    corpus: &[FiniteLE],
    exec: Exec,
) -> Result<EquivalenceReport, EvalError> {
    let found = par::map(exec, corpus, |le| compare(le, before, after));
    let mut discrepancies = Vec::new();
    for d in found {
        discrepancies.extend(d?);
    }
    Ok(EquivalenceReport { algebras: corpus.len(), discrepancies })
}

/// Input inequality against the output quasi-inequalities.
pub fn check_reduction(
    input: &Inequality,
    output: &[QuasiInequality],
    corpus: &[FiniteLE],
    exec: Exec,
) -> Result<EquivalenceReport, EvalError> {
    let before = [QuasiInequality::new(Vec::new(), input.clone())];
    check_equivalent(&before, output, corpus, exec)
}

fn quasis(systems: &[System]) -> Vec<QuasiInequality> {
    systems.iter().map(System::to_quasi).collect()
}

pub fn check_step(step: &DerivationStep, corpus: &[FiniteLE], exec: Exec) -> Result<EquivalenceReport, EvalError> {
    check_equivalent(&quasis(&step.before), &quasis(&step.after), corpus, exec)
}

/// A step whose before and after are not equivalent.
#[derive(Debug, Clone, Serialize)]
pub struct StepFailure {
    /// `None` for preprocessing, otherwise the system index.
    pub system: Option<usize>,
    pub step: usize,
    pub rule: String,
    pub report: EquivalenceReport,
}

/// Checks every step of a run. Steps are processed one after another; each
/// check fans out over the corpus.
pub fn check_steps(o: &RunOutcome, corpus: &[FiniteLE], exec: Exec) -> Result<Vec<StepFailure>, EvalError> {
    let mut out = Vec::new();
    let all = o
        .preprocess_steps
        .iter()
        .enumerate()
        .map(|(k, s)| (None, k, s))
        .chain(o.systems.iter().enumerate().flat_map(|(i, r)| r.steps.iter().enumerate().map(move |(k, s)| (Some(i), k, s))));
    for (system, step, s) in all {
        let report = check_step(s, corpus, exec)?;
        if !report.is_equivalent() {
            out.push(StepFailure { system, step, rule: s.rule.to_string(), report });
        }
    }
    Ok(out)
}

/// Deliberately breaks an output by weakening its consequent's right side to `bot`.
pub fn corrupt(output: &[QuasiInequality]) -> Vec<QuasiInequality> {
    let mut v = output.to_vec();
    if let Some(q) = v.first_mut() {
        q.consequent.rhs = crate::syntax::Term::Bot;
    }
    v
}
