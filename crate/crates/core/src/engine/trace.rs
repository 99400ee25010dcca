//! JSON derivation traces and their replay.

use serde::{Deserialize, Serialize};

use super::preprocess::apply_preprocess_step;
use super::rules::{ackermann_left, ackermann_right, approximate, residuate, split_member, EngineError};
use super::run::{Mode, RunConfig, RunOutcome};
use super::step::{DerivationStep, Position, Rule};
use super::system::System;
use crate::classifier::Witness;
use crate::syntax::{parse_inequality, parse_quasi, Inequality, QuasiInequality, Signature};

pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceConfig {
    pub mode: Mode,
    pub pivotal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub rule: Rule,
    pub position: Position,
    pub before: Vec<String>,
    pub after: Vec<String>,
}

impl From<&DerivationStep> for StepRecord {
    fn from(s: &DerivationStep) -> Self {
        let text = |v: &[System]| v.iter().map(System::to_string).collect();
        StepRecord { rule: s.rule, position: s.position.clone(), before: text(&s.before), after: text(&s.after) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Success,
    Stuck,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub status: Status,
    pub system: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemRecord {
    pub initial: String,
    pub witness: Witness,
    pub steps: Vec<StepRecord>,
    pub outcome: OutcomeRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub version: u32,
    pub input: String,
    pub config: TraceConfig,
    pub preprocessed: Vec<String>,
    pub preprocess_steps: Vec<StepRecord>,
    pub systems: Vec<SystemRecord>,
    pub output: Option<Vec<String>>,
    pub failure: Option<String>,
}

impl Trace {
    pub fn from_outcome(o: &RunOutcome) -> Self {
        let systems = o
            .systems
            .iter()
            .map(|s| {
                let outcome = match &s.result {
                    Ok(sys) => OutcomeRecord { status: Status::Success, system: sys.to_string(), reason: None },
                    Err(st) => OutcomeRecord { status: Status::Stuck, system: st.system.to_string(), reason: Some(st.reason.clone()) },
                };
                SystemRecord {
                    initial: s.initial.to_string(),
                    witness: s.witness.clone(),
                    steps: s.steps.iter().map(StepRecord::from).collect(),
                    outcome,
                }
            })
            .collect();
        Trace {
            version: TRACE_VERSION,
            input: o.input.to_string(),
            config: TraceConfig { mode: o.mode, pivotal: o.pivotal },
            preprocessed: o.preprocessed.iter().map(System::to_string).collect(),
            preprocess_steps: o.preprocess_steps.iter().map(StepRecord::from).collect(),
            systems,
            output: o.output().map(|v| v.iter().map(QuasiInequality::to_string).collect()),
            failure: o.failure_reason(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("traces serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, EngineError> {
        serde_json::from_str(text).map_err(|e| EngineError::Replay(format!("malformed trace: {e}")))
    }
}

fn parse_system(text: &str, sig: &Signature) -> Result<System, EngineError> {
    let q = parse_quasi(text, sig).map_err(|e| EngineError::Replay(format!("`{text}`: {e}")))?;
    Ok(System { s: q.antecedents, ineq: q.consequent })
}

fn parse_systems(texts: &[String], sig: &Signature) -> Result<Vec<System>, EngineError> {
    texts.iter().map(|t| parse_system(t, sig)).collect()
}

fn mismatch(what: &str, expected: &dyn std::fmt::Display, got: &dyn std::fmt::Display) -> EngineError {
    EngineError::Replay(format!("{what}: trace has `{expected}`, replay gives `{got}`"))
}

/// Applies one recorded Stage 2 step.
pub fn apply_step(sys: &System, rule: Rule, position: &Position, cfg: &RunConfig, sig: &Signature) -> Result<System, EngineError> {
    let bad = || EngineError::Replay(format!("rule {rule} does not take position {position}"));
    match (rule, position) {
        (r, Position::Node { index: None, side, path }) if r.is_approximation() => {
            let (applied, out) = approximate(sys, *side, path, cfg)?;
            if applied != r {
                return Err(EngineError::Replay(format!("position {position} calls for {applied}, not {r}")));
            }
            Ok(out)
        }
        (Rule::Split, Position::Item { index }) => split_member(sys, *index),
        (Rule::Residuate, Position::Coordinate { index, side, coordinate }) => {
            let m = sys.s.get(*index).ok_or_else(bad)?;
            let mut out = sys.clone();
            out.s[*index] = residuate(m, *side, *coordinate, sig)?;
            Ok(out)
        }
        (Rule::AckermannRA, Position::Letter { index: None, letter }) => ackermann_right(sys, letter),
        (Rule::AckermannLA, Position::Letter { index: None, letter }) => ackermann_left(sys, letter),
        _ => Err(bad()),
    }
}

/// Re-executes every recorded step, checking each intermediate system, and
/// returns the reconstructed output (`None` for a failed run).
pub fn replay(trace: &Trace, sig: &Signature) -> Result<Option<Vec<QuasiInequality>>, EngineError> {
    if trace.version != TRACE_VERSION {
        return Err(EngineError::Replay(format!("unsupported trace version {}", trace.version)));
    }
    let tsig = sig.tense()?;
    let input: Inequality =
        parse_inequality(&trace.input, sig).map_err(|e| EngineError::Replay(format!("input: {e}")))?;
    let cfg = RunConfig { mode: trace.config.mode, pivotal: trace.config.pivotal, ..RunConfig::default() };

    let mut items = vec![input];
    for (k, step) in trace.preprocess_steps.iter().enumerate() {
        let before: Vec<Inequality> = parse_systems(&step.before, sig)?.into_iter().map(|s| s.ineq).collect();
        if before != items {
            return Err(EngineError::Replay(format!("preprocessing step {k}: unexpected starting list")));
        }
        items = apply_preprocess_step(&items, step.rule, &step.position)
            .ok_or_else(|| EngineError::Replay(format!("preprocessing step {k}: {} does not apply", step.rule)))?;
        let after: Vec<Inequality> = parse_systems(&step.after, sig)?.into_iter().map(|s| s.ineq).collect();
        if after != items {
            return Err(EngineError::Replay(format!("preprocessing step {k}: result differs")));
        }
    }
    let preprocessed = parse_systems(&trace.preprocessed, &tsig)?;
    let got: Vec<System> = items.into_iter().map(System::new).collect();
    if preprocessed != got || trace.systems.len() != got.len() {
        return Err(EngineError::Replay("preprocessed systems differ".into()));
    }

    let mut output = Vec::new();
    let mut success = true;
    for (i, rec) in trace.systems.iter().enumerate() {
        let mut cur = parse_system(&rec.initial, &tsig)?;
        if cur != got[i] {
            return Err(mismatch("initial system", &rec.initial, &got[i]));
        }
        for (k, step) in rec.steps.iter().enumerate() {
            let before = parse_systems(&step.before, &tsig)?;
            if before != [cur.clone()] {
                return Err(EngineError::Replay(format!("system {i} step {k}: unexpected starting system")));
            }
            cur = apply_step(&cur, step.rule, &step.position, &cfg, &tsig)?;
            let after = parse_systems(&step.after, &tsig)?;
            if after != [cur.clone()] {
                return Err(mismatch(&format!("system {i} step {k}"), &step.after.join(", "), &cur));
            }
        }
        let last = parse_system(&rec.outcome.system, &tsig)?;
        if last != cur {
            return Err(mismatch(&format!("system {i} outcome"), &rec.outcome.system, &cur));
        }
        match rec.outcome.status {
            Status::Success if cur.is_pure() => output.push(cur.to_quasi()),
            Status::Success => return Err(EngineError::Replay(format!("system {i} is recorded as a success but is not pure"))),
            Status::Stuck => success = false,
        }
    }
    let replayed = success.then_some(output);
    let recorded = match &trace.output {
        Some(v) => Some(
            v.iter()
                .map(|t| parse_quasi(t, &tsig).map_err(|e| EngineError::Replay(format!("output: {e}"))))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    if recorded != replayed {
        return Err(EngineError::Replay("recorded output differs from the replayed one".into()));
    }
    Ok(replayed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;

    fn trace(text: &str, mode: Mode) -> (Trace, RunOutcome) {
        let sig = Signature::default_unary();
        let ineq = parse_inequality(text, &sig).unwrap();
        let o = run(&ineq, &sig, &RunConfig { mode, ..RunConfig::default() }).unwrap();
        (Trace::from_outcome(&o), o)
    }

    #[test]
    fn round_trip_and_replay() {
        let sig = Signature::default_unary();
        for (text, mode) in [
            ("f(p) <= g(p)", Mode::Proper),
            ("mu X. (p \\/ f(X)) <= g(p)", Mode::Proper),
            ("mu X. (p \\/ f(X)) <= g(p)", Mode::Tame),
            ("f(p \\/ q) \\/ (nu X. g(X)) <= g(p)", Mode::Tame),
        ] {
            let (t, o) = trace(text, mode);
            let back = Trace::from_json(&t.to_json()).unwrap();
            assert_eq!(back, t);
            assert_eq!(replay(&back, &sig).unwrap(), o.output(), "{text}");
        }
    }

    #[test]
    fn tampered_trace_is_rejected() {
        let sig = Signature::default_unary();
        let (mut t, _) = trace("f(p) <= g(p)", Mode::Proper);
        t.systems[0].steps[0].after[0] = "j2 <= p => f(j2) <= g(p)".into();
        assert!(replay(&t, &sig).is_err());
    }
}
