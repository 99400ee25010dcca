//! Random term generators: unrestricted terms for round trips and semantic
//! checks, and grammar-driven generators for the restricted and tame inductive
//! classes.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::classifier::{classify_inequality_with, ClassName, Epsilon};
use crate::par::Exec;
use crate::syntax::{
    BinderKind, ConnRef, Family, Inequality, OrderType, Polarity, Sign, Signature, Term,
};

const FP_NAMES: [&str; 5] = ["X", "Y", "Z", "W", "V"];

pub fn letter_names(n: usize) -> Vec<String> {
    ["p", "q", "r", "s", "t"].iter().take(n.max(1)).map(|s| s.to_string()).collect()
}

/// Unary `f`, `g` plus binary monotone `h` (F) and `k` (G).
pub fn rich_signature() -> Signature {
    let one = |n| OrderType(vec![Polarity::Pos; n]);
    Signature::declare(&[
        ("f".into(), Family::F, 1, one(1)),
        ("g".into(), Family::G, 1, one(1)),
        ("h".into(), Family::F, 2, one(2)),
        ("k".into(), Family::G, 2, one(2)),
    ])
    .expect("well-formed")
}

/// Settings for [`random_term`].
#[derive(Debug, Clone)]
pub struct TermGen {
    pub letters: Vec<String>,
    pub depth: usize,
    pub binders: Vec<BinderKind>,
    /// Nominals `j1, j2` and co-nominals `m1, m2` as leaves.
    pub nominals: bool,
    /// Draw residual connectives too (needs an expanded signature).
    pub residuals: bool,
}

impl TermGen {
    pub fn l1(letters: usize, depth: usize) -> Self {
        TermGen {
            letters: letter_names(letters),
            depth,
            binders: vec![BinderKind::Mu, BinderKind::Nu],
            nominals: false,
            residuals: false,
        }
    }
}

/// A random term; bound variables only occur positively.
pub fn random_term(rng: &mut impl Rng, sig: &Signature, cfg: &TermGen) -> Term {
    let conns: Vec<ConnRef> = if cfg.residuals { sig.all().cloned().collect() } else { sig.base().cloned().collect() };
    let mut bound = Vec::new();
    term_rec(rng, &conns, cfg, cfg.depth, &mut bound)
}

fn term_rec(rng: &mut impl Rng, conns: &[ConnRef], cfg: &TermGen, depth: usize, bound: &mut Vec<(String, bool)>) -> Term {
    if depth == 0 || rng.gen_bool(0.2) {
        let mut leaves: Vec<Term> = cfg.letters.iter().map(Term::prop).collect();
        leaves.extend(cfg.letters.iter().map(Term::prop));
        leaves.extend([Term::Bot, Term::Top]);
        if cfg.nominals {
            leaves.extend([Term::Nom(1), Term::Nom(2), Term::CoNom(1), Term::CoNom(2)]);
        }
        for (x, positive) in bound.iter() {
            if *positive {
                leaves.extend([Term::fpvar(x), Term::fpvar(x)]);
            }
        }
        return leaves.choose(rng).expect("non-empty").clone();
    }
    let roll = rng.gen_range(0..100);
    if roll < 18 && !cfg.binders.is_empty() && bound.len() < FP_NAMES.len() {
        let kind = *cfg.binders.choose(rng).expect("non-empty");
        let var = FP_NAMES[bound.len()].to_string();
        bound.push((var.clone(), true));
        let body = term_rec(rng, conns, cfg, depth - 1, bound);
        bound.pop();
        return Term::binder(kind, var, body).expect("bound variable kept positive");
    }
    if roll < 40 || conns.is_empty() {
        let a = term_rec(rng, conns, cfg, depth - 1, bound);
        let b = term_rec(rng, conns, cfg, depth - 1, bound);
        return if rng.gen_bool(0.5) { Term::meet(a, b) } else { Term::join(a, b) };
    }
    let c = conns.choose(rng).expect("non-empty").clone();
    let args = (0..c.arity())
        .map(|i| {
            let flip = c.polarity(i) == Polarity::Neg;
            if flip {
                bound.iter_mut().for_each(|b| b.1 = !b.1);
            }
            let t = term_rec(rng, conns, cfg, depth - 1, bound);
            if flip {
                bound.iter_mut().for_each(|b| b.1 = !b.1);
            }
            t
        })
        .collect();
    Term::app(c, args).expect("arity respected")
}

pub fn random_inequality(rng: &mut impl Rng, sig: &Signature, cfg: &TermGen) -> Inequality {
    Inequality::new(random_term(rng, sig, cfg), random_term(rng, sig, cfg))
}

/// A random fixed point term: a binder at the root over a random body.
pub fn random_fixpoint_term(rng: &mut impl Rng, sig: &Signature, letters: usize, depth: usize, kind: BinderKind) -> Term {
    let cfg = TermGen { binders: vec![kind], ..TermGen::l1(letters, depth) };
    let conns: Vec<ConnRef> = sig.base().cloned().collect();
    let mut bound = vec![("X".to_string(), true)];
    let body = term_rec(rng, &conns, &cfg, depth, &mut bound);
    Term::binder(kind, "X", body).expect("positive")
}

/// Which inductive subclass to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Restricted,
    Tame,
}

impl Target {
    pub fn class(self) -> ClassName {
        match self {
            Target::Restricted => ClassName::Restricted,
            Target::Tame => ClassName::Tame,
        }
    }
}

/// Grammar-driven generator. Terms are assembled from skeleton, PIA and
/// "safe" (no critical leaf) pieces relative to a random ε.
struct Shaper<'a, R: Rng> {
    rng: &'a mut R,
    f: ConnRef,
    g: ConnRef,
    h: Option<ConnRef>,
    k: Option<ConnRef>,
    letters: Vec<String>,
    eps: Epsilon,
    target: Target,
}

impl<R: Rng> Shaper<'_, R> {
    fn letters_where(&self, sign: Sign, critical: bool) -> Vec<String> {
        self.letters.iter().filter(|p| self.eps.is_critical(p, sign) == critical).cloned().collect()
    }

    fn critical_leaf(&mut self, sign: Sign) -> Term {
        let c = self.letters_where(sign, true);
        match c.choose(self.rng) {
            Some(p) => Term::prop(p),
            None => self.safe_leaf(sign, None),
        }
    }

    fn safe_leaf(&mut self, sign: Sign, fp: Option<(&str, Sign)>) -> Term {
        if let Some((x, s)) = fp {
            if s == sign && self.rng.gen_bool(0.5) {
                return Term::fpvar(x);
            }
        }
        let mut options: Vec<Term> = self.letters_where(sign, false).into_iter().map(Term::Prop).collect();
        options.push(if sign == Sign::Plus { Term::Bot } else { Term::Top });
        options.choose(self.rng).expect("non-empty").clone()
    }

    fn unary(&self, sign: Sign, skeleton: bool) -> ConnRef {
        // +f and -g are skeleton; +g and -f are PIA.
        match (sign, skeleton) {
            (Sign::Plus, true) | (Sign::Minus, false) => self.f.clone(),
            _ => self.g.clone(),
        }
    }

    fn lattice(sign: Sign, skeleton: bool, a: Term, b: Term) -> Term {
        match (sign, skeleton) {
            (Sign::Plus, true) | (Sign::Minus, false) => Term::join(a, b),
            _ => Term::meet(a, b),
        }
    }

    /// No critical leaves; binders only as tame allows them.
    fn safe(&mut self, sign: Sign, depth: usize, fp: Option<(&str, Sign)>) -> Term {
        if depth == 0 || self.rng.gen_bool(0.35) {
            return self.safe_leaf(sign, fp);
        }
        match self.rng.gen_range(0..10) {
            0..=3 => {
                let a = self.safe(sign, depth - 1, fp);
                let b = self.safe(sign, depth - 1, fp);
                if self.rng.gen_bool(0.5) {
                    Term::meet(a, b)
                } else {
                    Term::join(a, b)
                }
            }
            4..=6 => {
                let c = if self.rng.gen_bool(0.5) { self.f.clone() } else { self.g.clone() };
                let a = self.safe(sign, depth - 1, fp);
                Term::app(c, vec![a]).expect("unary")
            }
            _ if self.target == Target::Tame && fp.is_none() => {
                let kind = if sign == Sign::Plus { BinderKind::Nu } else { BinderKind::Mu };
                let body = self.safe(sign, depth - 1, Some(("X", sign)));
                Term::binder(kind, "X", body).expect("positive")
            }
            _ => self.safe_leaf(sign, fp),
        }
    }

    /// PIA part ending in a critical leaf.
    fn pia(&mut self, sign: Sign, depth: usize) -> Term {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return self.critical_leaf(sign);
        }
        match self.rng.gen_range(0..10) {
            0..=3 => {
                let a = self.pia(sign, depth - 1);
                let b = if self.rng.gen_bool(0.5) { self.pia(sign, depth - 1) } else { self.safe(sign, depth - 1, None) };
                Self::lattice(sign, false, a, b)
            }
            4..=7 => {
                let a = self.pia(sign, depth - 1);
                Term::app(self.unary(sign, false), vec![a]).expect("unary")
            }
            _ => {
                // Binary PIA node with a safe side argument.
                let c = match sign {
                    Sign::Plus => self.k.clone(),
                    Sign::Minus => self.h.clone(),
                };
                match c.filter(|_| self.target == Target::Restricted) {
                    Some(c) => {
                        let a = self.pia(sign, depth - 1);
                        let b = self.safe(sign, depth - 1, None);
                        Term::app(c, if self.rng.gen_bool(0.5) { vec![a, b] } else { vec![b, a] }).expect("binary")
                    }
                    None => self.critical_leaf(sign),
                }
            }
        }
    }

    /// Skeleton part over PIA parts.
    fn skel(&mut self, sign: Sign, depth: usize) -> Term {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.pia(sign, depth);
        }
        match self.rng.gen_range(0..12) {
            0..=3 => {
                let a = self.skel(sign, depth - 1);
                let b = match self.rng.gen_range(0..3) {
                    0 => self.skel(sign, depth - 1),
                    1 => self.pia(sign, depth - 1),
                    _ => self.safe(sign, depth - 1, None),
                };
                Self::lattice(sign, true, a, b)
            }
            4..=6 => {
                let a = self.skel(sign, depth - 1);
                Term::app(self.unary(sign, true), vec![a]).expect("unary")
            }
            7 => {
                let c = match sign {
                    Sign::Plus => self.h.clone(),
                    Sign::Minus => self.k.clone(),
                };
                match c {
                    Some(c) => {
                        let a = self.skel(sign, depth - 1);
                        let b = self.safe(sign, depth - 1, None);
                        Term::app(c, vec![a, b]).expect("binary")
                    }
                    None => self.pia(sign, depth),
                }
            }
            _ if self.target == Target::Restricted => {
                // +mu / -nu on the skeleton, with the recursion through a skeleton connective.
                let kind = if sign == Sign::Plus { BinderKind::Mu } else { BinderKind::Nu };
                let inner = self.skel(sign, depth - 1);
                let x = Term::fpvar("X");
                let rec = if self.rng.gen_bool(0.3) { x } else { Term::app(self.unary(sign, true), vec![x]).expect("unary") };
                Term::binder(kind, "X", Self::lattice(sign, true, inner, rec)).expect("positive")
            }
            _ => self.pia(sign, depth),
        }
    }

    fn side(&mut self, sign: Sign, depth: usize) -> Term {
        match self.rng.gen_range(0..10) {
            0..=5 => self.skel(sign, depth),
            6..=7 => self.pia(sign, depth),
            _ => self.safe(sign, depth, None),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassGen {
    pub target: Target,
    pub letters: usize,
    pub depth: usize,
    /// Use the binary connectives of [`rich_signature`].
    pub binary: bool,
}

/// Draws one candidate from the class grammar, without checking membership.
pub fn class_candidate(rng: &mut impl Rng, sig: &Signature, cfg: &ClassGen) -> Inequality {
    let letters = letter_names(cfg.letters);
    let mask = rng.gen_range(0..1usize << letters.len());
    let get = |n: &str| sig.get(n).cloned();
    let mut s = Shaper {
        f: get("f").expect("signature declares f"),
        g: get("g").expect("signature declares g"),
        h: get("h").filter(|_| cfg.binary),
        k: get("k").filter(|_| cfg.binary),
        eps: Epsilon::from_mask(&letters, mask),
        letters,
        target: cfg.target,
        rng,
    };
    let lhs = s.side(Sign::Plus, cfg.depth);
    let rhs = s.side(Sign::Minus, cfg.depth);
    Inequality::new(lhs, rhs)
}

/// `n` distinct members of the target class, drawn from the grammar and
/// confirmed by the classifier. Candidates without letters are skipped.
pub fn class_members(rng: &mut impl Rng, sig: &Signature, cfg: &ClassGen, n: usize) -> Vec<Inequality> {
    let mut out: Vec<Inequality> = Vec::new();
    for _ in 0..n * 200 {
        if out.len() == n {
            break;
        }
        let c = class_candidate(rng, sig, cfg);
        if !c.has_letters() || out.contains(&c) {
            continue;
        }
        let ok = classify_inequality_with(&c, Exec::Sequential).map(|r| r.holds(cfg.target.class())).unwrap_or(false);
        if ok {
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Language;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_terms_are_l1() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sig = rich_signature();
        for _ in 0..200 {
            let t = random_term(&mut rng, &sig, &TermGen::l1(3, 5));
            assert!(t.in_language(Language::L1), "{t}");
        }
    }

    #[test]
    fn grammar_yields_class_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for target in [Target::Restricted, Target::Tame] {
            let cfg = ClassGen { target, letters: 2, depth: 3, binary: true };
            let got = class_members(&mut rng, &rich_signature(), &cfg, 30);
            assert_eq!(got.len(), 30, "{target:?}");
        }
    }
}
