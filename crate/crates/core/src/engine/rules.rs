//! Stage 2 rules: approximation, residuation, splitting and the Ackermann rules.

use thiserror::Error;

use super::shape::syntactic_shape;
use super::step::{Rule, Side};
use super::system::System;
use super::{Mode, RunConfig};
use crate::classifier::{classify_node, NodeFlag};
use crate::syntax::{
    Family, Inequality, Language, NodeId, Origin, Path, Polarity, Sign, Signature, SignatureError, SignedTree, Term, Var,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("input must be an L1 inequality: {0}")]
    Input(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("approximation at {position}: {restriction}")]
    Approximation { position: String, restriction: String },
    #[error("residuation: {0}")]
    Residuation(String),
    #[error("splitting: {0}")]
    Split(String),
    #[error("{rule} on `{letter}`: {detail}")]
    Ackermann { rule: Rule, letter: String, detail: String },
    #[error("replay: {0}")]
    Replay(String),
}

/// No residuals and only starred binders.
fn in_star_language(t: &Term) -> bool {
    t.in_language(Language::StarPlus) && !t.has_residuals()
}

/// A maximal skeleton position in the goal, found by descending from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub side: Side,
    pub path: Path,
    /// Binders strictly above the position.
    pub crossed: Vec<Path>,
    /// A binder at which the tame restriction stopped the descent.
    pub blocked_binder: Option<Path>,
}

enum Stop {
    Node(NodeId),
    TameBinder(NodeId),
}

/// Walks from the root towards `leaf` through skeleton nodes and returns where the walk stops.
fn descend(tree: &SignedTree<'_>, leaf: NodeId, mode: Mode) -> Stop {
    let mut chain = tree.ancestors(leaf);
    chain.reverse();
    chain.push(leaf);
    let mut crossed = false;
    for (k, &n) in chain.iter().enumerate() {
        if n == leaf {
            return Stop::Node(n);
        }
        let node = tree.node(n);
        let class = classify_node(node.term, node.sign);
        if !class.is_skeleton() {
            return Stop::Node(n);
        }
        if matches!(node.term, Term::Binder(..)) {
            if mode == Mode::Tame {
                return Stop::TameBinder(n);
            }
            crossed = true;
        }
        if crossed && class.has(NodeFlag::SlrInner) {
            let next = chain[k + 1];
            if node.children.iter().any(|&c| c != next && tree.node(c).term.has_letters()) {
                return Stop::Node(n);
            }
        }
    }
    unreachable!("the chain ends in the leaf")
}

/// Extraction positions for every letter leaf of the goal, as an antichain
/// ordered left side first, then by path.
pub fn extraction_points(ineq: &Inequality, mode: Mode) -> Vec<Extraction> {
    let mut out = Vec::new();
    for (side, sign) in [(Side::Lhs, Sign::Plus), (Side::Rhs, Sign::Minus)] {
        let tree = SignedTree::new(side.of(ineq), sign);
        let mut picked: Vec<(NodeId, Option<NodeId>)> = Vec::new();
        for (leaf, _, _) in tree.letter_leaves() {
            let (mut x, blocked) = match descend(&tree, leaf, mode) {
                Stop::Node(n) => (n, None),
                Stop::TameBinder(n) => (n, Some(n)),
            };
            while !tree.node(x).term.is_sentence() {
                x = tree.node(x).parent.expect("the root is a sentence");
            }
            if !picked.iter().any(|(y, _)| *y == x) {
                picked.push((x, blocked.filter(|&b| b == x)));
            }
        }
        let ids: Vec<NodeId> = picked.iter().map(|(x, _)| *x).collect();
        let mut kept: Vec<(NodeId, Option<NodeId>)> =
            picked.into_iter().filter(|(x, _)| !tree.ancestors(*x).iter().any(|a| ids.contains(a))).collect();
        kept.sort_by(|a, b| tree.node(a.0).path.cmp(&tree.node(b.0).path));
        for (x, blocked) in kept {
            let crossed = tree
                .ancestors(x)
                .into_iter()
                .rev()
                .filter(|&a| matches!(tree.node(a).term, Term::Binder(..)))
                .map(|a| tree.node(a).path.clone())
                .collect();
            out.push(Extraction {
                side,
                path: tree.node(x).path.clone(),
                crossed,
                blocked_binder: blocked.map(|b| tree.node(b).path.clone()),
            });
        }
    }
    out
}

/// Applies an approximation rule at `path` of the goal after checking its side conditions.
pub fn approximate(sys: &System, side: Side, path: &[usize], cfg: &RunConfig) -> Result<(Rule, System), EngineError> {
    let fail = |restriction: &str| EngineError::Approximation {
        position: format!("{side:?}{path:?}"),
        restriction: restriction.to_string(),
    };
    let sign = match side {
        Side::Lhs => Sign::Plus,
        Side::Rhs => Sign::Minus,
    };
    let context = side.of(&sys.ineq);
    let tree = SignedTree::new(context, sign);
    let x = tree.find_path(path).ok_or_else(|| fail("no node at this path"))?;
    let gamma = tree.node(x).term;
    if !in_star_language(context) || !in_star_language(gamma) {
        return Err(fail("restriction 1: context and extracted term must be star terms without residuals"));
    }
    if !gamma.is_sentence() {
        return Err(fail("extracted term is not a sentence"));
    }
    let mut above = tree.ancestors(x);
    above.reverse();
    let mut crossed = false;
    for (k, &n) in above.iter().enumerate() {
        let node = tree.node(n);
        let class = classify_node(node.term, node.sign);
        if !class.is_skeleton() {
            return Err(fail("restriction 2: the branch to the root must consist of skeleton nodes"));
        }
        if matches!(node.term, Term::Binder(..)) {
            if cfg.mode == Mode::Tame {
                return Err(fail("tame restriction violated: the branch crosses a fixed point binder"));
            }
            crossed = true;
        }
        if crossed && class.has(NodeFlag::SlrInner) {
            let next = above.get(k + 1).copied().unwrap_or(x);
            if node.children.iter().any(|&c| c != next && tree.node(c).term.has_letters()) {
                return Err(fail(
                    "restriction 3: side condition assumed syntactically fails (live side subtree below a binder)",
                ));
            }
        }
    }
    if cfg.pivotal && !extraction_points(&sys.ineq, cfg.mode).iter().any(|e| e.side == side && e.path == path) {
        return Err(fail("pivotal restriction: the skeleton branch is not maximal"));
    }
    let (rule, fresh, member) = match (side, tree.node(x).sign) {
        (Side::Lhs, Sign::Plus) => {
            let j = sys.fresh_nominal();
            (Rule::ApproxLPlus, j.clone(), Inequality::new(j, gamma.clone()))
        }
        (Side::Lhs, Sign::Minus) => {
            let m = sys.fresh_conominal();
            (Rule::ApproxLMinus, m.clone(), Inequality::new(gamma.clone(), m))
        }
        (Side::Rhs, Sign::Plus) => {
            let j = sys.fresh_nominal();
            (Rule::ApproxRPlus, j.clone(), Inequality::new(j, gamma.clone()))
        }
        (Side::Rhs, Sign::Minus) => {
            let m = sys.fresh_conominal();
            (Rule::ApproxRMinus, m.clone(), Inequality::new(gamma.clone(), m))
        }
    };
    let mut out = sys.clone();
    *side.of_mut(&mut out.ineq) = context.replace_at(path, fresh).expect("path checked");
    out.s.push(member);
    Ok((rule, out))
}

/// Residuates `ineq` in `coordinate` (0-based) of the connective heading `side`.
pub fn residuate(ineq: &Inequality, side: Side, coordinate: usize, sig: &Signature) -> Result<Inequality, EngineError> {
    let Term::App(c, args) = side.of(ineq) else {
        return Err(EngineError::Residuation(format!("`{}` is not headed by a connective on the {side:?}", ineq)));
    };
    let expected = match side {
        Side::Lhs => Family::F,
        Side::Rhs => Family::G,
    };
    if c.family != expected || c.is_residual() {
        return Err(EngineError::Residuation(format!("`{}` cannot be residuated on the {side:?}", c.name)));
    }
    if coordinate >= args.len() {
        return Err(EngineError::Residuation(format!("coordinate {} out of range for `{}`", coordinate + 1, c.name)));
    }
    let res = sig
        .residual(&c.name, coordinate)
        .ok_or_else(|| EngineError::Residuation(format!("no residual of `{}` in coordinate {}", c.name, coordinate + 1)))?;
    let psi = match side {
        Side::Lhs => ineq.rhs.clone(),
        Side::Rhs => ineq.lhs.clone(),
    };
    let phi = args[coordinate].clone();
    let mut rargs = args.clone();
    rargs[coordinate] = psi;
    let r = Term::App(res.clone(), rargs);
    Ok(match (side, c.polarity(coordinate)) {
        (Side::Lhs, Polarity::Pos) | (Side::Rhs, Polarity::Neg) => Inequality::new(phi, r),
        (Side::Lhs, Polarity::Neg) | (Side::Rhs, Polarity::Pos) => Inequality::new(r, phi),
    })
}

/// Reads a residuation display backwards: recovers the upper inequality from a lower one.
pub fn invert_residuation(ineq: &Inequality, sig: &Signature) -> Option<Inequality> {
    let attempt = |res_side: Side| -> Option<Inequality> {
        let Term::App(r, rargs) = res_side.of(ineq) else { return None };
        let Origin::Residual { parent, coordinate } = &r.origin else { return None };
        let base = sig.get(parent)?;
        let i = *coordinate;
        let phi = match res_side {
            Side::Lhs => ineq.rhs.clone(),
            Side::Rhs => ineq.lhs.clone(),
        };
        let expected_side = match (base.family, base.polarity(i)) {
            (Family::F, Polarity::Pos) | (Family::G, Polarity::Neg) => Side::Rhs,
            (Family::F, Polarity::Neg) | (Family::G, Polarity::Pos) => Side::Lhs,
        };
        if expected_side != res_side {
            return None;
        }
        let psi = rargs[i].clone();
        let mut args = rargs.clone();
        args[i] = phi;
        let upper = Term::App(base.clone(), args);
        Some(match base.family {
            Family::F => Inequality::new(upper, psi),
            Family::G => Inequality::new(psi, upper),
        })
    };
    attempt(Side::Rhs).or_else(|| attempt(Side::Lhs))
}

pub fn split_member(sys: &System, index: usize) -> Result<System, EngineError> {
    let m = sys.s.get(index).ok_or_else(|| EngineError::Split(format!("no member #{index}")))?;
    let (a, b) = super::preprocess::split_once(m).ok_or_else(|| EngineError::Split(format!("`{m}` does not split")))?;
    let mut out = sys.clone();
    out.s.splice(index..=index, [a, b]);
    Ok(out)
}

fn positivity_ok(t: &Term, p: &str, positive: bool) -> bool {
    let pos = t.positivity(&Var::prop(p));
    if positive {
        pos.is_positive()
    } else {
        pos.is_negative()
    }
}

fn shape_ok(t: &Term, open: bool) -> bool {
    syntactic_shape(t).map(|s| if open { s.open } else { s.closed }).unwrap_or(false)
}

/// Right Ackermann rule (`right = true`) or its order dual, the left rule.
fn ackermann(sys: &System, p: &str, right: bool) -> Result<System, EngineError> {
    let rule = if right { Rule::AckermannRA } else { Rule::AckermannLA };
    let err = |detail: String| EngineError::Ackermann { rule, letter: p.to_string(), detail };
    if !sys.members().any(|m| m.contains_prop(p)) {
        return Err(err(format!("`{p}` does not occur")));
    }
    let letter = Term::prop(p);
    let mut alphas = Vec::new();
    let mut kept: Vec<(bool, Inequality)> = Vec::new();
    for m in &sys.s {
        if !m.contains_prop(p) {
            kept.push((false, m.clone()));
            continue;
        }
        let (solved, alpha) = if right { (&m.rhs, &m.lhs) } else { (&m.lhs, &m.rhs) };
        if *solved == letter && !alpha.contains_prop(p) {
            // α ≤ p needs α closed; p ≤ α needs α open.
            if !shape_ok(alpha, !right) {
                let shape = if right { "syntactically closed" } else { "syntactically open" };
                return Err(err(format!("in `{m}`, `{alpha}` is not {shape}")));
            }
            alphas.push(alpha.clone());
            continue;
        }
        check_member(m, p, right).map_err(err)?;
        kept.push((true, m.clone()));
    }
    if sys.ineq.contains_prop(p) {
        check_member(&sys.ineq, p, right).map_err(err)?;
    }
    let value = if right { Term::join_all(alphas) } else { Term::meet_all(alphas) };
    let v = Var::prop(p);
    let s = kept.into_iter().map(|(touch, m)| if touch { m.substitute(&v, &value) } else { m }).collect();
    Ok(System { s, ineq: sys.ineq.substitute(&v, &value) })
}

/// RA: `β ≤ γ` with β positive and closed, γ negative and open. LA: dually.
fn check_member(m: &Inequality, p: &str, right: bool) -> Result<(), String> {
    let lo_ok = positivity_ok(&m.lhs, p, right) && shape_ok(&m.lhs, false);
    let hi_ok = positivity_ok(&m.rhs, p, !right) && shape_ok(&m.rhs, true);
    let (lo_pol, hi_pol) = if right { ("positive", "negative") } else { ("negative", "positive") };
    if !lo_ok {
        return Err(format!("in `{m}`, the left side is not {lo_pol} in {p} and syntactically closed"));
    }
    if !hi_ok {
        return Err(format!("in `{m}`, the right side is not {hi_pol} in {p} and syntactically open"));
    }
    Ok(())
}

pub fn ackermann_right(sys: &System, p: &str) -> Result<System, EngineError> {
    ackermann(sys, p, true)
}

pub fn ackermann_left(sys: &System, p: &str) -> Result<System, EngineError> {
    ackermann(sys, p, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_inequality, parse_quasi};

    fn sig() -> Signature {
        Signature::declare(&[
            ("f".into(), Family::F, 1, crate::syntax::OrderType::parse("(1)").unwrap()),
            ("g".into(), Family::G, 1, crate::syntax::OrderType::parse("(1)").unwrap()),
            ("h".into(), Family::F, 2, crate::syntax::OrderType::parse("(1,d)").unwrap()),
        ])
        .unwrap()
        .tense()
        .unwrap()
    }

    fn sys(text: &str) -> System {
        let q = parse_quasi(text, &sig()).unwrap();
        System { s: q.antecedents, ineq: q.consequent }
    }

    fn proper() -> RunConfig {
        RunConfig { mode: Mode::Proper, pivotal: true, ..RunConfig::default() }
    }

    #[test]
    fn approximation_examples() {
        let s0 = sys("=> mu* X. (p \\/ f(X)) <= g(p)");
        let (rule, s1) = approximate(&s0, Side::Lhs, &[0, 0], &proper()).unwrap();
        assert_eq!(rule, Rule::ApproxLPlus);
        assert_eq!(s1, sys("j1 <= p => mu* X. (j1 \\/ f(X)) <= g(p)"));
        let (rule, s2) = approximate(&s1, Side::Rhs, &[0], &proper()).unwrap();
        assert_eq!(rule, Rule::ApproxRMinus);
        assert_eq!(s2, sys("j1 <= p & p <= m1 => mu* X. (j1 \\/ f(X)) <= g(m1)"));

        let tame = RunConfig { mode: Mode::Tame, pivotal: true, ..RunConfig::default() };
        let err = approximate(&s0, Side::Lhs, &[0, 0], &tame).unwrap_err();
        assert!(err.to_string().contains("tame restriction"));
    }

    #[test]
    fn pivotal_restriction() {
        let s0 = sys("=> f(f(p)) <= q");
        assert!(approximate(&s0, Side::Lhs, &[], &proper()).is_err());
        let loose = RunConfig { pivotal: false, ..proper() };
        let (_, s1) = approximate(&s0, Side::Lhs, &[], &loose).unwrap();
        assert_eq!(s1, sys("j1 <= f(f(p)) => j1 <= q"));
        assert_eq!(extraction_points(&s0.ineq, Mode::Proper)[0].path, vec![0, 0]);
    }

    #[test]
    fn residuation_examples() {
        let s = sig();
        let i = |t: &str| parse_inequality(t, &s).unwrap();
        assert_eq!(residuate(&i("f(p) <= m1"), Side::Lhs, 0, &s).unwrap(), i("p <= f#1(m1)"));
        assert_eq!(residuate(&i("j1 <= g(p)"), Side::Rhs, 0, &s).unwrap(), i("gb1(j1) <= p"));
        assert_eq!(residuate(&i("h(p, q) <= m1"), Side::Lhs, 1, &s).unwrap(), i("h#2(p, m1) <= q"));
        assert!(residuate(&i("p <= m1"), Side::Lhs, 0, &s).is_err());
        assert!(residuate(&i("f(p) <= m1"), Side::Lhs, 1, &s).is_err());
        for (t, side, c) in [("f(p) <= m1", Side::Lhs, 0), ("j1 <= g(p)", Side::Rhs, 0), ("h(p, q) <= m1", Side::Lhs, 1)] {
            let r = residuate(&i(t), side, c, &s).unwrap();
            assert_eq!(invert_residuation(&r, &s).unwrap(), i(t));
        }
    }

    #[test]
    fn ackermann_examples() {
        let out = ackermann_right(&sys("j1 <= p & p <= m1 => mu* X. (j1 \\/ f(X)) <= g(m1)"), "p").unwrap();
        assert_eq!(out, sys("j1 <= m1 => mu* X. (j1 \\/ f(X)) <= g(m1)"));
        let out = ackermann_right(&sys("p <= m1 => j1 <= m1"), "p").unwrap();
        assert_eq!(out, sys("bot <= m1 => j1 <= m1"));
        let err = ackermann_right(&sys("m1 <= p & p <= m2 => j1 <= m1"), "p").unwrap_err();
        assert!(err.to_string().contains("not syntactically closed"));

        let out = ackermann_left(&sys("p <= m1 & gb1(j1) <= p => j1 <= m1"), "p").unwrap();
        assert_eq!(out, sys("gb1(j1) <= m1 => j1 <= m1"));
        let out = ackermann_left(&sys("j1 <= g(p) => j1 <= m1"), "p").unwrap();
        assert_eq!(out, sys("j1 <= g(top) => j1 <= m1"));
        assert!(ackermann_left(&sys("p <= j1 => j1 <= m1"), "p").is_err());
    }

    #[test]
    fn goal_takes_part_in_the_partition() {
        let out = ackermann_right(&sys("j1 <= p => f(p) <= m1"), "p").unwrap();
        assert_eq!(out, sys("=> f(j1) <= m1"));
        assert!(ackermann_right(&sys("j1 <= p => m1 <= f(p)"), "p").is_err());
    }
}
