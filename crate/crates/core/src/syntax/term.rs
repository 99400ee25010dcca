//! Terms, inequalities and quasi-inequalities over a signature.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::signature::{ConnRef, Polarity};
use super::signed::Sign;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinderKind {
    Mu,
    Nu,
    Mu2,
    Nu2,
    MuStar,
    NuStar,
}

impl BinderKind {
    pub const ALL: [BinderKind; 6] =
        [BinderKind::Mu, BinderKind::Nu, BinderKind::Mu2, BinderKind::Nu2, BinderKind::MuStar, BinderKind::NuStar];

    pub fn keyword(self) -> &'static str {
        match self {
            BinderKind::Mu => "mu",
            BinderKind::Nu => "nu",
            BinderKind::Mu2 => "mu2",
            BinderKind::Nu2 => "nu2",
            BinderKind::MuStar => "mu*",
            BinderKind::NuStar => "nu*",
        }
    }

    /// Least fixed point binders (`mu`, `mu2`, `mu*`).
    pub fn is_least(self) -> bool {
        matches!(self, BinderKind::Mu | BinderKind::Mu2 | BinderKind::MuStar)
    }

    pub fn is_star(self) -> bool {
        matches!(self, BinderKind::MuStar | BinderKind::NuStar)
    }

    pub fn star(self) -> Self {
        if self.is_least() {
            BinderKind::MuStar
        } else {
            BinderKind::NuStar
        }
    }
}

/// Anything that can be substituted for or tested for polarity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    Prop(String),
    Fp(String),
    Nom(u32),
    CoNom(u32),
}

impl Var {
    pub fn prop(name: impl Into<String>) -> Self {
        Var::Prop(name.into())
    }

    pub fn fp(name: impl Into<String>) -> Self {
        Var::Fp(name.into())
    }

    fn matches(&self, t: &Term) -> bool {
        match (self, t) {
            (Var::Prop(a), Term::Prop(b)) | (Var::Fp(a), Term::FpVar(b)) => a == b,
            (Var::Nom(a), Term::Nom(b)) | (Var::CoNom(a), Term::CoNom(b)) => a == b,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Bot,
    Top,
    Prop(String),
    FpVar(String),
    Nom(u32),
    CoNom(u32),
    Meet(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
    App(ConnRef, Vec<Term>),
    Binder(BinderKind, String, Box<Term>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("connective `{name}` expects {expected} arguments, got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("body of `{kind} {var}` is not positive in {var}")]
    NotPositive { kind: &'static str, var: String },
}

/// Result of a polarity query for a variable in a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Positivity {
    Positive,
    Negative,
    /// The variable does not occur, so the term is vacuously both.
    Both,
    Neither,
}

impl Positivity {
    pub fn is_positive(self) -> bool {
        matches!(self, Positivity::Positive | Positivity::Both)
    }

    pub fn is_negative(self) -> bool {
        matches!(self, Positivity::Negative | Positivity::Both)
    }
}

/// Term languages; the `Plus` variants admit nominals, co-nominals and residuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Language {
    Base,
    L1,
    L2,
    Star,
    L1Plus,
    L2Plus,
    StarPlus,
}

impl Language {
    fn plus(self) -> bool {
        matches!(self, Language::L1Plus | Language::L2Plus | Language::StarPlus)
    }

    fn admits(self, kind: BinderKind) -> bool {
        match self {
            Language::Base => false,
            Language::L1 | Language::L1Plus => matches!(kind, BinderKind::Mu | BinderKind::Nu),
            Language::L2 | Language::L2Plus => matches!(kind, BinderKind::Mu2 | BinderKind::Nu2),
            Language::Star | Language::StarPlus => kind.is_star(),
        }
    }
}

pub type Path = Vec<usize>;

impl Term {
    pub fn prop(name: impl Into<String>) -> Term {
        Term::Prop(name.into())
    }

    pub fn fpvar(name: impl Into<String>) -> Term {
        Term::FpVar(name.into())
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: Term, b: Term) -> Term {
        Term::Join(Box::new(a), Box::new(b))
    }

    /// Joins a list, `⊥` when empty.
    pub fn join_all(items: impl IntoIterator<Item = Term>) -> Term {
        items.into_iter().reduce(Term::join).unwrap_or(Term::Bot)
    }

    /// Meets a list, `⊤` when empty.
    pub fn meet_all(items: impl IntoIterator<Item = Term>) -> Term {
        items.into_iter().reduce(Term::meet).unwrap_or(Term::Top)
    }

    pub fn app(conn: ConnRef, args: Vec<Term>) -> Result<Term, TermError> {
        if conn.arity() != args.len() {
            return Err(TermError::Arity { name: conn.name.clone(), expected: conn.arity(), got: args.len() });
        }
        Ok(Term::App(conn, args))
    }

    /// Builds a binder, checking that the body is positive in the bound variable.
    pub fn binder(kind: BinderKind, var: impl Into<String>, body: Term) -> Result<Term, TermError> {
        let var = var.into();
        if !body.positivity(&Var::Fp(var.clone())).is_positive() {
            return Err(TermError::NotPositive { kind: kind.keyword(), var });
        }
        Ok(Term::Binder(kind, var, Box::new(body)))
    }

    pub fn is_leaf(&self) -> bool {
        self.children().is_empty()
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Meet(a, b) | Term::Join(a, b) => vec![a, b],
            Term::App(_, args) => args.iter().collect(),
            Term::Binder(_, _, body) => vec![body],
            _ => Vec::new(),
        }
    }

    fn children_mut(&mut self) -> Vec<&mut Term> {
        match self {
            Term::Meet(a, b) | Term::Join(a, b) => vec![a, b],
            Term::App(_, args) => args.iter_mut().collect(),
            Term::Binder(_, _, body) => vec![body],
            _ => Vec::new(),
        }
    }

    /// Sign transfer from this node to child `i`.
    pub fn child_polarity(&self, i: usize) -> Polarity {
        match self {
            Term::App(c, _) => c.polarity(i),
            _ => Polarity::Pos,
        }
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&Term> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    pub fn subterm_mut(&mut self, path: &[usize]) -> Option<&mut Term> {
        let mut cur = self;
        for &i in path {
            cur = cur.children_mut().into_iter().nth(i)?;
        }
        Some(cur)
    }

    /// Returns a copy with the subterm at `path` replaced.
    pub fn replace_at(&self, path: &[usize], new: Term) -> Option<Term> {
        let mut out = self.clone();
        *out.subterm_mut(path)? = new;
        Some(out)
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Proposition letters in first-occurrence (print) order.
    pub fn letters(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut Vec<String>) {
        if let Term::Prop(p) = self {
            if !out.contains(p) {
                out.push(p.clone());
            }
        }
        for c in self.children() {
            c.collect_letters(out);
        }
    }

    pub fn has_letters(&self) -> bool {
        match self {
            Term::Prop(_) => true,
            _ => self.children().iter().any(|c| c.has_letters()),
        }
    }

    pub fn contains_prop(&self, p: &str) -> bool {
        match self {
            Term::Prop(q) => q == p,
            _ => self.children().iter().any(|c| c.contains_prop(p)),
        }
    }

    pub fn nominals(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::Nom(k) = t {
                out.insert(*k);
            }
        });
        out
    }

    pub fn conominals(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::CoNom(k) = t {
                out.insert(*k);
            }
        });
        out
    }

    pub fn has_binders(&self) -> bool {
        match self {
            Term::Binder(..) => true,
            _ => self.children().iter().any(|c| c.has_binders()),
        }
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a Term)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn free_fpvars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::FpVar(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Binder(_, x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    fn all_fpvar_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| match t {
            Term::FpVar(x) | Term::Binder(_, x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    /// True iff every fixed point variable occurrence is bound.
    pub fn is_sentence(&self) -> bool {
        self.free_fpvars().is_empty()
    }

    /// Signs (in the positive generation tree) of the free occurrences of `v`.
    pub fn occurrence_signs(&self, v: &Var) -> BTreeSet<Sign> {
        let mut out = BTreeSet::new();
        self.collect_signs(v, Sign::Plus, &mut out);
        out
    }

    fn collect_signs(&self, v: &Var, sign: Sign, out: &mut BTreeSet<Sign>) {
        if v.matches(self) {
            out.insert(sign);
            return;
        }
        if let (Term::Binder(_, x, _), Var::Fp(y)) = (self, v) {
            if x == y {
                return;
            }
        }
        for (i, c) in self.children().into_iter().enumerate() {
            c.collect_signs(v, sign.apply(self.child_polarity(i)), out);
        }
    }

    pub fn positivity(&self, v: &Var) -> Positivity {
        let signs = self.occurrence_signs(v);
        match (signs.contains(&Sign::Plus), signs.contains(&Sign::Minus)) {
            (false, false) => Positivity::Both,
            (true, false) => Positivity::Positive,
            (false, true) => Positivity::Negative,
            (true, true) => Positivity::Neither,
        }
    }

    /// Capture-avoiding substitution of `s` for the free occurrences of `v`.
    pub fn substitute(&self, v: &Var, s: &Term) -> Term {
        let s_free = s.free_fpvars();
        self.subst_inner(v, s, &s_free)
    }

    fn subst_inner(&self, v: &Var, s: &Term, s_free: &BTreeSet<String>) -> Term {
        if v.matches(self) {
            return s.clone();
        }
        match self {
            Term::Binder(kind, x, body) => {
                if matches!(v, Var::Fp(y) if y == x) {
                    return self.clone();
                }
                if s_free.contains(x) && body.occurs_free(v) {
                    let mut avoid = body.all_fpvar_names();
                    avoid.extend(s_free.iter().cloned());
                    avoid.extend(s.all_fpvar_names());
                    if let Var::Fp(y) = v {
                        avoid.insert(y.clone());
                    }
                    let fresh = fresh_fpvar(x, &avoid);
                    let renamed = body.subst_inner(&Var::Fp(x.clone()), &Term::FpVar(fresh.clone()), &BTreeSet::new());
                    return Term::Binder(*kind, fresh, Box::new(renamed.subst_inner(v, s, s_free)));
                }
                Term::Binder(*kind, x.clone(), Box::new(body.subst_inner(v, s, s_free)))
            }
            _ => {
                let mut out = self.clone();
                for (c, orig) in out.children_mut().into_iter().zip(self.children()) {
                    *c = orig.subst_inner(v, s, s_free);
                }
                out
            }
        }
    }

    fn occurs_free(&self, v: &Var) -> bool {
        !self.occurrence_signs(v).is_empty()
    }

    /// Replaces `mu`/`nu` (and their second-kind variants) by `mu*`/`nu*`.
    pub fn star(&self) -> Term {
        let mut out = self.clone();
        out.star_in_place();
        out
    }

    fn star_in_place(&mut self) {
        if let Term::Binder(kind, _, _) = self {
            *kind = kind.star();
        }
        for c in self.children_mut() {
            c.star_in_place();
        }
    }

    /// Replaces every binder by the given least/greatest pair (`mu`-type → `least`).
    pub fn with_binders(&self, least: BinderKind, greatest: BinderKind) -> Term {
        let mut out = self.clone();
        fn go(t: &mut Term, least: BinderKind, greatest: BinderKind) {
            if let Term::Binder(kind, _, _) = t {
                *kind = if kind.is_least() { least } else { greatest };
            }
            for c in t.children_mut() {
                go(c, least, greatest);
            }
        }
        go(&mut out, least, greatest);
        out
    }

    pub fn in_language(&self, lang: Language) -> bool {
        match self {
            Term::Bot | Term::Top | Term::Prop(_) => true,
            Term::FpVar(_) => lang != Language::Base,
            Term::Nom(_) | Term::CoNom(_) => lang.plus(),
            Term::App(c, args) => (lang.plus() || !c.is_residual()) && args.iter().all(|a| a.in_language(lang)),
            Term::Binder(k, _, body) => lang.admits(*k) && body.in_language(lang),
            Term::Meet(a, b) | Term::Join(a, b) => a.in_language(lang) && b.in_language(lang),
        }
    }

    pub fn has_residuals(&self) -> bool {
        match self {
            Term::App(c, _) if c.is_residual() => true,
            _ => self.children().iter().any(|c| c.has_residuals()),
        }
    }

    pub fn is_pure(&self) -> bool {
        !self.has_letters()
    }
}

/// The smallest `<stem><n>` (n ≥ 1) not in `avoid`, where `stem` is `base` without trailing digits.
pub fn fresh_fpvar(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "X" } else { stem };
    (1..).map(|n| format!("{stem}{n}")).find(|c| !avoid.contains(c)).expect("unbounded")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Inequality {
    pub lhs: Term,
    pub rhs: Term,
}

impl Inequality {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Inequality { lhs, rhs }
    }

    pub fn letters(&self) -> Vec<String> {
        let mut out = self.lhs.letters();
        for p in self.rhs.letters() {
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    pub fn has_letters(&self) -> bool {
        self.lhs.has_letters() || self.rhs.has_letters()
    }

    pub fn contains_prop(&self, p: &str) -> bool {
        self.lhs.contains_prop(p) || self.rhs.contains_prop(p)
    }

    pub fn is_pure(&self) -> bool {
        !self.has_letters()
    }

    pub fn in_language(&self, lang: Language) -> bool {
        self.lhs.in_language(lang) && self.rhs.in_language(lang)
    }

    pub fn substitute(&self, v: &Var, s: &Term) -> Inequality {
        Inequality::new(self.lhs.substitute(v, s), self.rhs.substitute(v, s))
    }

    pub fn star(&self) -> Inequality {
        Inequality::new(self.lhs.star(), self.rhs.star())
    }

    /// Polarity of the inequality in `v`: positive iff `lhs` is negative and `rhs` positive.
    pub fn positivity(&self, v: &Var) -> Positivity {
        let l = self.lhs.positivity(v);
        let r = self.rhs.positivity(v);
        let pos = l.is_negative() && r.is_positive();
        let neg = l.is_positive() && r.is_negative();
        match (pos, neg) {
            (true, true) => Positivity::Both,
            (true, false) => Positivity::Positive,
            (false, true) => Positivity::Negative,
            (false, false) => Positivity::Neither,
        }
    }

    pub fn nominals(&self) -> BTreeSet<u32> {
        let mut s = self.lhs.nominals();
        s.extend(self.rhs.nominals());
        s
    }

    pub fn conominals(&self) -> BTreeSet<u32> {
        let mut s = self.lhs.conominals();
        s.extend(self.rhs.conominals());
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuasiInequality {
    pub antecedents: Vec<Inequality>,
    pub consequent: Inequality,
}

impl QuasiInequality {
    pub fn new(antecedents: Vec<Inequality>, consequent: Inequality) -> Self {
        QuasiInequality { antecedents, consequent }
    }

    pub fn inequalities(&self) -> impl Iterator<Item = &Inequality> {
        self.antecedents.iter().chain(std::iter::once(&self.consequent))
    }

    pub fn is_pure(&self) -> bool {
        self.inequalities().all(|i| i.is_pure())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::signature::{Family, OrderType, Signature};

    fn sig() -> Signature {
        Signature::declare(&[
            ("f".into(), Family::F, 1, OrderType::parse("(1)").unwrap()),
            ("h".into(), Family::F, 1, OrderType::parse("(d)").unwrap()),
            ("g".into(), Family::G, 1, OrderType::parse("(1)").unwrap()),
        ])
        .unwrap()
    }

    fn f(t: Term) -> Term {
        Term::app(sig().get("f").unwrap().clone(), vec![t]).unwrap()
    }

    fn h(t: Term) -> Term {
        Term::app(sig().get("h").unwrap().clone(), vec![t]).unwrap()
    }

    #[test]
    fn positivity_cases() {
        let g = Term::app(sig().get("g").unwrap().clone(), vec![Term::prop("p")]).unwrap();
        assert_eq!(g.positivity(&Var::prop("p")), Positivity::Positive);
        assert_eq!(Term::Top.positivity(&Var::prop("p")), Positivity::Both);
        let mixed = Term::meet(Term::prop("p"), h(Term::prop("p")));
        assert_eq!(mixed.positivity(&Var::prop("p")), Positivity::Neither);
        assert_eq!(h(Term::prop("p")).positivity(&Var::prop("p")), Positivity::Negative);
    }

    #[test]
    fn binder_requires_positive_body() {
        assert!(Term::binder(BinderKind::Mu, "X", h(Term::fpvar("X"))).is_err());
        assert!(Term::binder(BinderKind::Mu, "X", f(Term::fpvar("X"))).is_ok());
        assert!(Term::binder(BinderKind::Nu, "X", h(h(Term::fpvar("X")))).is_ok());
    }

    #[test]
    fn arity_checked() {
        let err = Term::app(sig().get("f").unwrap().clone(), vec![Term::Bot, Term::Top]).unwrap_err();
        assert!(matches!(err, TermError::Arity { expected: 1, got: 2, .. }));
    }

    #[test]
    fn sentences() {
        let b = Term::binder(BinderKind::Mu, "X", f(Term::fpvar("X"))).unwrap();
        assert!(b.is_sentence());
        assert!(!f(Term::fpvar("X")).is_sentence());
        assert!(Term::prop("p").is_sentence());
    }

    #[test]
    fn substitution() {
        let t = Term::join(Term::prop("p"), Term::prop("q"));
        assert_eq!(t.substitute(&Var::prop("p"), &Term::Bot), Term::join(Term::Bot, Term::prop("q")));
        assert_eq!(Term::prop("p").substitute(&Var::prop("q"), &Term::Top), Term::prop("p"));

        let b = Term::binder(BinderKind::Mu, "X", Term::join(Term::prop("p"), Term::fpvar("X"))).unwrap();
        let out = b.substitute(&Var::prop("p"), &Term::fpvar("X"));
        let expected =
            Term::Binder(BinderKind::Mu, "X1".into(), Box::new(Term::join(Term::fpvar("X"), Term::fpvar("X1"))));
        assert_eq!(out, expected);
    }

    #[test]
    fn bound_variable_is_shadowed() {
        let b = Term::binder(BinderKind::Nu, "X", f(Term::fpvar("X"))).unwrap();
        assert_eq!(b.substitute(&Var::fp("X"), &Term::Top), b);
    }

    #[test]
    fn star_translation() {
        let inner = Term::binder(BinderKind::Mu, "Y", Term::join(Term::fpvar("X"), Term::fpvar("Y"))).unwrap();
        let t = Term::binder(BinderKind::Nu, "X", inner).unwrap();
        let s = t.star();
        match &s {
            Term::Binder(BinderKind::NuStar, _, body) => {
                assert!(matches!(**body, Term::Binder(BinderKind::MuStar, _, _)))
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(s.in_language(Language::Star));
        assert!(!s.in_language(Language::L1));
        assert_eq!(Term::prop("p").star(), Term::prop("p"));
    }

    #[test]
    fn languages() {
        let t = Term::join(Term::Nom(1), f(Term::prop("p")));
        assert!(!t.in_language(Language::L1));
        assert!(t.in_language(Language::L1Plus));
        assert!(f(Term::prop("p")).in_language(Language::Base));
        assert!(!Term::fpvar("X").in_language(Language::Base));
    }

    #[test]
    fn inequality_polarity() {
        let i = Inequality::new(Term::Top, Term::prop("p"));
        assert_eq!(i.positivity(&Var::prop("p")), Positivity::Positive);
        let i = Inequality::new(f(Term::prop("p")), Term::prop("p"));
        assert_eq!(i.positivity(&Var::prop("p")), Positivity::Neither);
    }
}
