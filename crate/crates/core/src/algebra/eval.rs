//! Term evaluation and exhaustive validity checks.
//!
//! A finite lattice is its own canonical extension, so nominals and co-nominals
//! range over every element and all binder kinds share one interpretation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::le::{FiniteLE, OpTable};
use super::lattice::Elem;
use crate::syntax::{Inequality, QuasiInequality, Term, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("no operation table for `{0}`")]
    MissingOperation(String),
}

pub type Assignment = BTreeMap<Var, Elem>;

/// How fixed points are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    /// Kleene iteration from the bottom (top) element.
    #[default]
    Iteration,
    /// Meet of all pre-fixed points (join of all post-fixed points).
    Extremal,
}

#[derive(Debug, Clone)]
enum Expr<'a> {
    Const(Elem),
    Slot(usize),
    Meet(Box<Expr<'a>>, Box<Expr<'a>>),
    Join(Box<Expr<'a>>, Box<Expr<'a>>),
    Op(&'a OpTable, Vec<Expr<'a>>),
    Fix { least: bool, slot: usize, body: Box<Expr<'a>> },
}

/// Terms compiled against one algebra, sharing a table of free symbols.
#[derive(Debug, Clone)]
pub struct Compiled<'a> {
    le: &'a FiniteLE,
    exprs: Vec<Expr<'a>>,
    /// Free symbols, in first-occurrence order; slot `i` holds `symbols[i]`.
    pub symbols: Vec<Var>,
    slots: usize,
}

struct Compiler<'a> {
    le: &'a FiniteLE,
    symbols: Vec<Var>,
    bound: Vec<(String, usize)>,
    slots: usize,
    /// Reserved count of free-symbol slots (bound slots come after).
    free_slots: usize,
}

impl<'a> Compiler<'a> {
    fn free(&mut self, v: Var) -> usize {
        if let Some(i) = self.symbols.iter().position(|s| *s == v) {
            return i;
        }
        self.symbols.push(v);
        self.symbols.len() - 1
    }

    fn go(&mut self, t: &Term) -> Result<Expr<'a>, EvalError> {
        let l = self.le.lattice();
        Ok(match t {
            Term::Bot => Expr::Const(l.bot()),
            Term::Top => Expr::Const(l.top()),
            Term::Prop(p) => Expr::Slot(self.free(Var::Prop(p.clone()))),
            Term::Nom(k) => Expr::Slot(self.free(Var::Nom(*k))),
            Term::CoNom(k) => Expr::Slot(self.free(Var::CoNom(*k))),
            Term::FpVar(x) => match self.bound.iter().rev().find(|(y, _)| y == x) {
                Some(&(_, slot)) => Expr::Slot(self.free_slots + slot),
                None => Expr::Slot(self.free(Var::Fp(x.clone()))),
            },
            Term::Meet(a, b) => Expr::Meet(Box::new(self.go(a)?), Box::new(self.go(b)?)),
            Term::Join(a, b) => Expr::Join(Box::new(self.go(a)?), Box::new(self.go(b)?)),
            Term::App(c, args) => {
                let table = self.le.table(&c.name).ok_or_else(|| EvalError::MissingOperation(c.name.clone()))?;
                Expr::Op(table, args.iter().map(|a| self.go(a)).collect::<Result<_, _>>()?)
            }
            Term::Binder(kind, x, body) => {
                let slot = self.slots;
                self.slots += 1;
                self.bound.push((x.clone(), slot));
                let body = self.go(body)?;
                self.bound.pop();
                Expr::Fix { least: kind.is_least(), slot: self.free_slots + slot, body: Box::new(body) }
            }
        })
    }
}

/// Upper bound on free symbols in one compilation; bound slots follow.
const FREE_CAP: usize = 64;

impl<'a> Compiled<'a> {
    pub fn new(le: &'a FiniteLE, terms: &[&Term]) -> Result<Self, EvalError> {
        let mut c = Compiler { le, symbols: Vec::new(), bound: Vec::new(), slots: 0, free_slots: FREE_CAP };
        let exprs = terms.iter().map(|t| c.go(t)).collect::<Result<Vec<_>, _>>()?;
        assert!(c.symbols.len() <= FREE_CAP, "too many free symbols");
        Ok(Compiled { le, exprs, symbols: c.symbols, slots: FREE_CAP + c.slots })
    }

    /// A zeroed environment of the right size.
    pub fn env(&self) -> Vec<Elem> {
        vec![0; self.slots]
    }

    pub fn env_from(&self, v: &Assignment) -> Result<Vec<Elem>, EvalError> {
        let mut env = self.env();
        for (i, s) in self.symbols.iter().enumerate() {
            env[i] = *v.get(s).ok_or_else(|| EvalError::Unbound(s.to_string()))?;
        }
        Ok(env)
    }

    pub fn eval(&self, idx: usize, env: &mut [Elem], route: Route) -> Elem {
        self.run(&self.exprs[idx], env, route)
    }

    fn run(&self, e: &Expr<'a>, env: &mut [Elem], route: Route) -> Elem {
        let l = self.le.lattice();
        match e {
            Expr::Const(c) => *c,
            Expr::Slot(i) => env[*i],
            Expr::Meet(a, b) => {
                let x = self.run(a, env, route);
                let y = self.run(b, env, route);
                l.meet(x, y)
            }
            Expr::Join(a, b) => {
                let x = self.run(a, env, route);
                let y = self.run(b, env, route);
                l.join(x, y)
            }
            Expr::Op(table, args) => {
                let n = l.size();
                let idx = args.iter().fold(0, |acc, a| acc * n + self.run(a, env, route));
                table.values[idx]
            }
            Expr::Fix { least, slot, body } => {
                let saved = env[*slot];
                let out = match route {
                    Route::Iteration => {
                        let mut x = if *least { l.bot() } else { l.top() };
                        let mut steps = 0;
                        loop {
                            env[*slot] = x;
                            let y = self.run(body, env, route);
                            if y == x {
                                break x;
                            }
                            steps += 1;
                            assert!(steps <= l.size(), "fixed point iteration exceeded the carrier size");
                            x = y;
                        }
                    }
                    Route::Extremal => {
                        let mut acc = if *least { l.top() } else { l.bot() };
                        for a in l.elements() {
                            env[*slot] = a;
                            let y = self.run(body, env, route);
                            if *least && l.leq(y, a) {
                                acc = l.meet(acc, a);
                            } else if !*least && l.leq(a, y) {
                                acc = l.join(acc, a);
                            }
                        }
                        acc
                    }
                };
                env[*slot] = saved;
                out
            }
        }
    }

    /// Calls `f` on every total assignment of the free symbols until it returns `false`.
    pub fn for_each_assignment(&self, mut f: impl FnMut(&mut [Elem]) -> bool) {
        let n = self.le.lattice().size();
        let k = self.symbols.len();
        let mut env = self.env();
        loop {
            if !f(&mut env) {
                return;
            }
            let mut i = 0;
            loop {
                if i == k {
                    return;
                }
                env[i] += 1;
                if env[i] < n {
                    break;
                }
                env[i] = 0;
                i += 1;
            }
        }
    }

    pub fn describe(&self, env: &[Elem]) -> BTreeMap<String, String> {
        let l = self.le.lattice();
        self.symbols.iter().enumerate().map(|(i, s)| (s.to_string(), l.element_name(env[i]).to_string())).collect()
    }
}

pub fn evaluate(le: &FiniteLE, t: &Term, v: &Assignment) -> Result<Elem, EvalError> {
    evaluate_with(le, t, v, Route::Iteration)
}

pub fn evaluate_with(le: &FiniteLE, t: &Term, v: &Assignment, route: Route) -> Result<Elem, EvalError> {
    let c = Compiled::new(le, &[t])?;
    let mut env = c.env_from(v)?;
    Ok(c.eval(0, &mut env, route))
}

/// A falsifying assignment, keyed by printed symbol and element name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub algebra: String,
    pub assignment: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Validity {
    Valid,
    Invalid(Counterexample),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Exhaustive check over every assignment of letters, nominals, co-nominals and free fixed point variables.
pub fn check_inequality(le: &FiniteLE, ineq: &Inequality) -> Result<Validity, EvalError> {
    check_quasi(le, &QuasiInequality::new(Vec::new(), ineq.clone()))
}

pub fn check_quasi(le: &FiniteLE, q: &QuasiInequality) -> Result<Validity, EvalError> {
    let mut terms: Vec<&Term> = Vec::new();
    for a in &q.antecedents {
        terms.push(&a.lhs);
        terms.push(&a.rhs);
    }
    terms.push(&q.consequent.lhs);
    terms.push(&q.consequent.rhs);
    let c = Compiled::new(le, &terms)?;
    let l = le.lattice();
    let m = q.antecedents.len();
    let mut bad = None;
    c.for_each_assignment(|env| {
        for i in 0..m {
            let x = c.eval(2 * i, env, Route::Iteration);
            let y = c.eval(2 * i + 1, env, Route::Iteration);
            if !l.leq(x, y) {
                return true;
            }
        }
        let x = c.eval(2 * m, env, Route::Iteration);
        let y = c.eval(2 * m + 1, env, Route::Iteration);
        if l.leq(x, y) {
            true
        } else {
            bad = Some(c.describe(env));
            false
        }
    });
    Ok(match bad {
        None => Validity::Valid,
        Some(assignment) => Validity::Invalid(Counterexample { algebra: le.name.clone(), assignment }),
    })
}

/// Whether the term function of `body` preserves every non-empty join in each
/// of the `coords`, for all values of its other free symbols.
pub fn check_targeted_preservation(le: &FiniteLE, body: &Term, coords: &[Var]) -> Result<bool, EvalError> {
    let c = Compiled::new(le, &[body])?;
    let l = le.lattice();
    let n = l.size();
    let mut ok = true;
    for v in coords {
        let Some(slot) = c.symbols.iter().position(|s| s == v) else { continue };
        c.for_each_assignment(|env| {
            for subset in 1u32..(1 << n) {
                let members: Vec<Elem> = (0..n).filter(|&e| subset >> e & 1 == 1).collect();
                env[slot] = l.join_all(members.iter().copied());
                let whole = c.eval(0, env, Route::Iteration);
                let parts = l.join_all(members.iter().map(|&e| {
                    env[slot] = e;
                    c.eval(0, env, Route::Iteration)
                }));
                if whole != parts {
                    ok = false;
                    return false;
                }
            }
            true
        });
        if !ok {
            break;
        }
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::lattice::FiniteLattice;
    use crate::syntax::{parse_inequality, parse_quasi, parse_term, Signature};

    fn identity_le(l: FiniteLattice) -> FiniteLE {
        let s = Signature::default_unary();
        let l = Arc::new(l);
        let id: Vec<Elem> = l.elements().collect();
        let mut le = FiniteLE::new(l);
        le.attach_operation(s.get("f").unwrap().clone(), id.clone()).unwrap();
        le.attach_operation(s.get("g").unwrap().clone(), id).unwrap();
        le
    }

    #[test]
    fn trivial_fixed_points() {
        let s = Signature::default_unary();
        let le = identity_le(FiniteLattice::m3());
        let v = Assignment::new();
        assert_eq!(evaluate(&le, &parse_term("mu X. X", &s).unwrap(), &v).unwrap(), 0);
        assert_eq!(evaluate(&le, &parse_term("nu X. X", &s).unwrap(), &v).unwrap(), 4);
    }

    #[test]
    fn least_fixed_point_of_join_with_identity() {
        let s = Signature::default_unary();
        let le = identity_le(FiniteLattice::chain(2));
        let t = parse_term("mu X. (a \\/ f(X))", &s).unwrap();
        let v: Assignment = [(Var::prop("a"), 1)].into_iter().collect();
        assert_eq!(evaluate_with(&le, &t, &v, Route::Iteration).unwrap(), 1);
        assert_eq!(evaluate_with(&le, &t, &v, Route::Extremal).unwrap(), 1);
    }

    #[test]
    fn unbound_symbol() {
        let s = Signature::default_unary();
        let le = identity_le(FiniteLattice::chain(2));
        let err = evaluate(&le, &parse_term("p", &s).unwrap(), &Assignment::new()).unwrap_err();
        assert_eq!(err, EvalError::Unbound("p".into()));
    }

    #[test]
    fn validity_checks() {
        let s = Signature::default_unary();
        let le = identity_le(FiniteLattice::chain(2));
        assert!(check_inequality(&le, &parse_inequality("p <= p", &s).unwrap()).unwrap().is_valid());
        assert!(check_inequality(&le, &parse_inequality("f(p) <= g(p)", &s).unwrap()).unwrap().is_valid());
        assert!(check_quasi(&le, &parse_quasi("j1 <= m1 => f(j1) <= g(m1)", &s).unwrap()).unwrap().is_valid());
        assert!(check_quasi(&le, &parse_quasi("=> bot <= top", &s).unwrap()).unwrap().is_valid());
        assert!(!check_quasi(&le, &parse_quasi("=> top <= bot", &s).unwrap()).unwrap().is_valid());
    }

    #[test]
    fn counterexample_names_the_assignment() {
        // 3-chain 0 < 1 < 2 with g collapsing the middle element.
        let s = Signature::default_unary();
        let l = Arc::new(FiniteLattice::chain(3));
        let mut le = FiniteLE::new(l);
        le.attach_operation(s.get("f").unwrap().clone(), vec![0, 1, 2]).unwrap();
        le.attach_operation(s.get("g").unwrap().clone(), vec![0, 0, 2]).unwrap();
        match check_inequality(&le, &parse_inequality("f(p) <= g(p)", &s).unwrap()).unwrap() {
            Validity::Invalid(c) => assert_eq!(c.assignment["p"], "1"),
            Validity::Valid => panic!("expected a counterexample"),
        }
    }

    #[test]
    fn targeted_preservation() {
        let s = Signature::default_unary();
        let le = identity_le(FiniteLattice::chain(2));
        let body = parse_term("x \\/ f(X)", &s).unwrap();
        assert!(check_targeted_preservation(&le, &body, &[Var::prop("x")]).unwrap());

        let le = identity_le(FiniteLattice::m3());
        let body = parse_term("x /\\ c", &s).unwrap();
        assert!(!check_targeted_preservation(&le, &body, &[Var::prop("x")]).unwrap());
        let body = parse_term("x", &s).unwrap();
        assert!(check_targeted_preservation(&le, &body, &[Var::prop("x")]).unwrap());
    }
}
