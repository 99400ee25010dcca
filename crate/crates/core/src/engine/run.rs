//! The deterministic Stage 2 strategy and complete runs.

use serde::{Deserialize, Serialize};

use super::preprocess::{preprocess_traced, split_once};
use super::rules::{ackermann_left, ackermann_right, approximate, extraction_points, residuate, EngineError};
use super::step::{DerivationStep, Position, Rule, Side};
use super::system::System;
use crate::classifier::{classify_inequality_with, ClassName, Epsilon, StrictOrder, Witness};
use crate::par::{self, Exec};
use crate::syntax::{
    Family, Inequality, Language, Polarity, QuasiInequality, Sign, Signature, SignedTree, Term,
};

const MAX_ROUNDS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Tame,
    #[default]
    Proper,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tame" => Ok(Mode::Tame),
            "proper" => Ok(Mode::Proper),
            _ => Err(format!("unknown mode `{s}` (expected tame or proper)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub pivotal: bool,
    /// Strategy witness; classified automatically when absent.
    pub epsilon: Option<Epsilon>,
    pub omega: Option<StrictOrder>,
    pub exec: Exec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { mode: Mode::Proper, pivotal: true, epsilon: None, omega: None, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stuck {
    pub system: System,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemRun {
    pub initial: System,
    pub witness: Witness,
    pub steps: Vec<DerivationStep>,
    pub result: Result<System, Stuck>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub input: Inequality,
    pub mode: Mode,
    pub pivotal: bool,
    pub preprocess_steps: Vec<DerivationStep>,
    pub preprocessed: Vec<System>,
    pub systems: Vec<SystemRun>,
}

impl RunOutcome {
    pub fn is_success(&self) -> bool {
        self.systems.iter().all(|s| s.result.is_ok())
    }

    /// The pure quasi-inequalities, on success.
    pub fn output(&self) -> Option<Vec<QuasiInequality>> {
        self.systems.iter().map(|s| s.result.as_ref().ok().map(System::to_quasi)).collect()
    }

    pub fn failure_reason(&self) -> Option<String> {
        self.systems.iter().enumerate().find_map(|(i, s)| match &s.result {
            Err(st) => Some(format!("system {}: {}", i + 1, st.reason)),
            Ok(_) => None,
        })
    }
}

/// Picks the strategy witness for one preprocessed inequality.
pub fn choose_witness(ineq: &Inequality, cfg: &RunConfig) -> Witness {
    let letters = ineq.letters();
    if let Some(eps) = &cfg.epsilon {
        let epsilon = Epsilon(letters.iter().map(|p| (p.clone(), eps.get(p))).collect());
        return Witness { epsilon, omega: cfg.omega.clone().unwrap_or_default() };
    }
    let prefs = match cfg.mode {
        Mode::Proper => [ClassName::Restricted, ClassName::Inductive],
        Mode::Tame => [ClassName::Tame, ClassName::Inductive],
    };
    if let Ok(report) = classify_inequality_with(ineq, Exec::Sequential) {
        for class in prefs {
            if let Some(w) = report.witness(class) {
                return w.clone();
            }
        }
    }
    Witness { epsilon: Epsilon::uniform(&letters, Polarity::Pos), omega: StrictOrder::default() }
}

/// Runs ALBA on an L1 inequality.
pub fn run(input: &Inequality, sig: &Signature, cfg: &RunConfig) -> Result<RunOutcome, EngineError> {
    if !input.in_language(Language::L1) {
        return Err(EngineError::Input(input.to_string()));
    }
    let tsig = sig.tense()?;
    let (pre_star, preprocessed, preprocess_steps) = preprocess_traced(input);
    let indices: Vec<usize> = (0..preprocessed.len()).collect();
    let systems = par::map(cfg.exec, &indices, |&i| {
        let witness = choose_witness(&pre_star[i], cfg);
        run_system(&preprocessed[i], witness, cfg, &tsig)
    });
    Ok(RunOutcome { input: input.clone(), mode: cfg.mode, pivotal: cfg.pivotal, preprocess_steps, preprocessed, systems })
}

struct Runner<'a> {
    cur: System,
    steps: Vec<DerivationStep>,
    cfg: &'a RunConfig,
    sig: &'a Signature,
}

impl Runner<'_> {
    fn push(&mut self, rule: Rule, position: Position, next: System) {
        let before = std::mem::replace(&mut self.cur, next);
        self.steps.push(DerivationStep { rule, position, before: vec![before], after: vec![self.cur.clone()] });
    }
}

/// Runs Stage 2 on one system.
pub fn run_system(initial: &System, witness: Witness, cfg: &RunConfig, sig: &Signature) -> SystemRun {
    let mut r = Runner { cur: initial.clone(), steps: Vec::new(), cfg, sig };
    let result = stage_two(&mut r, &witness).map(|()| r.cur.clone()).map_err(|reason| Stuck { system: r.cur.clone(), reason });
    SystemRun { initial: initial.clone(), witness, steps: r.steps, result }
}

fn stage_two(r: &mut Runner<'_>, witness: &Witness) -> Result<(), String> {
    if r.cur.is_pure() {
        return Ok(());
    }
    let goal = r.cur.ineq.clone();
    let mut blocked: Vec<String> = Vec::new();
    let mut extracted: Vec<(Side, Vec<usize>)> = Vec::new();
    loop {
        let points = extraction_points(&r.cur.ineq, r.cfg.mode);
        let Some(e) = points.iter().find(|e| {
            e.side.of(&r.cur.ineq).subterm(&e.path).is_some_and(Term::has_letters)
        }) else {
            break;
        };
        if e.blocked_binder.is_some() {
            blocked.push(e.side.of(&r.cur.ineq).subterm(&e.path).expect("valid path").to_string());
        }
        let tame_note = |msg: String| with_tame_note(msg, &blocked);
        let (rule, next) = approximate(&r.cur, e.side, &e.path, r.cfg).map_err(|err| tame_note(err.to_string()))?;
        extracted.push((e.side, e.path.clone()));
        r.push(rule, Position::Node { index: None, side: e.side, path: e.path.clone() }, next);
    }
    if r.cfg.mode == Mode::Proper {
        check_proper(&goal, &extracted)?;
    }

    let letters = r.cur.letters();
    let order = witness
        .omega
        .linearize(&letters)
        .ok_or_else(|| format!("the order {} is cyclic", witness.omega))?;
    for _ in 0..MAX_ROUNDS {
        if r.cur.is_pure() {
            return Ok(());
        }
        let mut errors = Vec::new();
        let mut progressed = false;
        let live: Vec<&String> = order.iter().filter(|p| r.cur.members().any(|m| m.contains_prop(p))).collect();
        for p in live {
            let eps = witness.epsilon.get(p);
            if let Err(e) = surface(r, p, eps) {
                errors.push(e);
            }
            let attempts: [(Rule, fn(&System, &str) -> Result<System, EngineError>); 2] = match eps {
                Polarity::Pos => [(Rule::AckermannRA, ackermann_right), (Rule::AckermannLA, ackermann_left)],
                Polarity::Neg => [(Rule::AckermannLA, ackermann_left), (Rule::AckermannRA, ackermann_right)],
            };
            for (rule, apply) in attempts {
                match apply(&r.cur, p) {
                    Ok(next) => {
                        r.push(rule, Position::Letter { index: None, letter: p.clone() }, next);
                        progressed = true;
                        break;
                    }
                    Err(e) => errors.push(e.to_string()),
                }
            }
            if progressed {
                break;
            }
        }
        if !progressed {
            return Err(with_tame_note(errors.join("; "), &blocked));
        }
    }
    Err("no pure system within the round limit".into())
}

fn with_tame_note(msg: String, blocked: &[String]) -> String {
    match blocked.first() {
        Some(b) => format!("{msg}; tame restriction blocked extraction through {b}"),
        None => msg,
    }
}

/// Every binder with letters in its scope must lie strictly above an extracted position.
fn check_proper(goal: &Inequality, extracted: &[(Side, Vec<usize>)]) -> Result<(), String> {
    for (side, sign) in [(Side::Lhs, Sign::Plus), (Side::Rhs, Sign::Minus)] {
        let tree = SignedTree::new(side.of(goal), sign);
        for n in &tree.nodes {
            if !matches!(n.term, Term::Binder(..)) || !n.term.has_letters() {
                continue;
            }
            let crossed = extracted
                .iter()
                .any(|(s, p)| *s == side && p.len() > n.path.len() && p.starts_with(&n.path));
            if !crossed {
                return Err(format!("proper run: binder `{}` does not lie along any extraction branch", n.term));
            }
        }
    }
    Ok(())
}

/// Positions of occurrences of `p` in `ineq` whose polarity in the inequality is critical for `eps`.
fn critical_occurrences(ineq: &Inequality, p: &str, eps: Polarity) -> Vec<(Side, Vec<usize>)> {
    let mut out = Vec::new();
    for side in [Side::Lhs, Side::Rhs] {
        let tree = SignedTree::new(side.of(ineq), Sign::Plus);
        for (leaf, name, sign) in tree.letter_leaves() {
            if name != p {
                continue;
            }
            let positive_in_ineq = match side {
                Side::Lhs => sign == Sign::Minus,
                Side::Rhs => sign == Sign::Plus,
            };
            if positive_in_ineq == (eps == Polarity::Pos) {
                out.push((side, tree.node(leaf).path.clone()));
            }
        }
    }
    out
}

fn is_solved(ineq: &Inequality, p: &str, eps: Polarity) -> bool {
    let letter = Term::prop(p);
    match eps {
        Polarity::Pos => ineq.rhs == letter && !ineq.lhs.contains_prop(p),
        Polarity::Neg => ineq.lhs == letter && !ineq.rhs.contains_prop(p),
    }
}

enum Move {
    Split,
    Residuate(Side, usize),
}

fn next_move(ineq: &Inequality, p: &str, eps: Polarity) -> Result<Option<Move>, String> {
    if is_solved(ineq, p, eps) {
        return Ok(None);
    }
    let occ = critical_occurrences(ineq, p, eps);
    if occ.is_empty() {
        return Ok(None);
    }
    if split_once(ineq).is_some() {
        return Ok(Some(Move::Split));
    }
    let side = occ[0].0;
    let coordinate = occ[0].1.first().copied();
    let uniform = occ.iter().all(|(s, path)| *s == side && path.first().copied() == coordinate);
    let family = match side {
        Side::Lhs => Family::F,
        Side::Rhs => Family::G,
    };
    match (side.of(ineq), coordinate) {
        (Term::App(c, _), Some(i)) if uniform && c.family == family && !c.is_residual() => Ok(Some(Move::Residuate(side, i))),
        _ => Err(format!("cannot display the critical occurrences of `{p}` in `{ineq}`")),
    }
}

/// Splits and residuates until every critical occurrence of `p` sits in a solved member.
fn surface(r: &mut Runner<'_>, p: &str, eps: Polarity) -> Result<(), String> {
    for _ in 0..MAX_ROUNDS * 4 {
        let mut acted = false;
        for index in 0..r.cur.s.len() {
            let m = &r.cur.s[index];
            match next_move(m, p, eps)? {
                None => continue,
                Some(Move::Split) => {
                    let (a, b) = split_once(m).expect("split checked");
                    let mut next = r.cur.clone();
                    next.s.splice(index..=index, [a, b]);
                    r.push(Rule::Split, Position::Item { index }, next);
                }
                Some(Move::Residuate(side, coordinate)) => {
                    let out = residuate(m, side, coordinate, r.sig).map_err(|e| e.to_string())?;
                    let mut next = r.cur.clone();
                    next.s[index] = out;
                    r.push(Rule::Residuate, Position::Coordinate { index, side, coordinate }, next);
                }
            }
            acted = true;
            break;
        }
        if !acted {
            return Ok(());
        }
    }
    Err(format!("residuation for `{p}` did not terminate"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_inequality, parse_quasi};

    fn go(text: &str, mode: Mode) -> RunOutcome {
        let sig = Signature::default_unary();
        let ineq = parse_inequality(text, &sig).unwrap();
        run(&ineq, &sig, &RunConfig { mode, ..RunConfig::default() }).unwrap()
    }

    fn quasi(text: &str) -> QuasiInequality {
        parse_quasi(text, &Signature::default_unary().tense().unwrap()).unwrap()
    }

    #[test]
    fn golden_runs() {
        for mode in [Mode::Tame, Mode::Proper] {
            let out = go("f(p) <= g(p)", mode);
            assert_eq!(out.output().unwrap(), vec![quasi("j1 <= m1 => f(j1) <= g(m1)")]);
        }
        let out = go("mu X. (p \\/ f(X)) <= g(p)", Mode::Proper);
        assert_eq!(out.output().unwrap(), vec![quasi("j1 <= m1 => mu* X. (j1 \\/ f(X)) <= g(m1)")]);

        let out = go("mu X. (p \\/ f(X)) <= g(p)", Mode::Tame);
        assert!(!out.is_success());
        assert!(out.failure_reason().unwrap().contains("tame restriction"), "{:?}", out.failure_reason());

        let out = go("f(p) \\/ (nu X. g(X)) <= g(p)", Mode::Tame);
        let got = out.output().unwrap();
        assert_eq!(got.len(), 2);
        assert!(got.contains(&quasi("=> nu* X. g(X) <= g(bot)")));
        assert!(got.contains(&quasi("j1 <= m1 => f(j1) <= g(m1)")));
    }

    #[test]
    fn partial_sequences_are_consistent() {
        let out = go("mu X. (p \\/ f(X)) <= g(p)", Mode::Proper);
        let run = &out.systems[0];
        let mut cur = run.initial.clone();
        for s in &run.steps {
            assert_eq!(s.before, vec![cur.clone()]);
            cur = s.after[0].clone();
        }
        assert_eq!(Ok(cur), run.result);
    }

    #[test]
    fn rejects_non_l1_input() {
        let sig = Signature::default_unary();
        let ineq = parse_inequality("mu* X. f(X) <= p", &sig).unwrap();
        assert!(run(&ineq, &sig, &RunConfig::default()).is_err());
    }
}
