//! Stage 1: monotone elimination, distribution, splitting and star conversion.

use super::step::{DerivationStep, Position, Rule, Side};
use super::system::System;
use crate::syntax::{Family, Inequality, Path, Polarity, Sign, Term, Var};

/// The first letter in which `ineq` has a single polarity, with the constant replacing it.
fn monotone_letter(ineq: &Inequality) -> Option<(String, Term)> {
    ineq.letters().into_iter().find_map(|p| monotone_letter_named(ineq, &p))
}

pub fn eliminate_monotone_letter(ineq: &Inequality, letter: &str) -> Option<Inequality> {
    let (p, value) = monotone_letter_named(ineq, letter)?;
    Some(ineq.substitute(&Var::prop(p), &value))
}

fn monotone_letter_named(ineq: &Inequality, letter: &str) -> Option<(String, Term)> {
    let v = Var::prop(letter);
    if !ineq.contains_prop(letter) {
        return None;
    }
    let (l, r) = (ineq.lhs.positivity(&v), ineq.rhs.positivity(&v));
    if l.is_negative() && r.is_positive() {
        Some((letter.to_string(), Term::Bot))
    } else if l.is_positive() && r.is_negative() {
        Some((letter.to_string(), Term::Top))
    } else {
        None
    }
}

/// Substitutes `⊥` for letters in which the inequality is positive and `⊤` for
/// those in which it is negative, to a fixpoint.
pub fn eliminate_monotone(ineq: &Inequality) -> Inequality {
    let mut cur = ineq.clone();
    while let Some((p, value)) = monotone_letter(&cur) {
        cur = cur.substitute(&Var::prop(p), &value);
    }
    cur
}

/// The first distributable node of `t` (signed `sign`), outside binders, in pre-order.
fn distributable(t: &Term, sign: Sign, path: &mut Path) -> Option<Path> {
    match t {
        Term::Binder(..) => None,
        Term::App(c, args) => {
            let fires = matches!((c.family, sign), (Family::F, Sign::Plus) | (Family::G, Sign::Minus));
            if fires {
                for (i, a) in args.iter().enumerate() {
                    let target = match (c.family, c.polarity(i)) {
                        (Family::F, Polarity::Pos) | (Family::G, Polarity::Neg) => matches!(a, Term::Join(..)),
                        (Family::F, Polarity::Neg) | (Family::G, Polarity::Pos) => matches!(a, Term::Meet(..)),
                    };
                    if target {
                        return Some(path.clone());
                    }
                }
            }
            for (i, a) in args.iter().enumerate() {
                path.push(i);
                let found = distributable(a, sign.apply(c.polarity(i)), path);
                path.pop();
                if found.is_some() {
                    return found;
                }
            }
            None
        }
        Term::Meet(a, b) | Term::Join(a, b) => {
            for (i, c) in [a, b].into_iter().enumerate() {
                path.push(i);
                let found = distributable(c, sign, path);
                path.pop();
                if found.is_some() {
                    return found;
                }
            }
            None
        }
        _ => None,
    }
}

/// The first distribution site of `ineq`, searching `+lhs` then `-rhs`.
pub fn distribution_site(ineq: &Inequality) -> Option<(Side, Path)> {
    for (side, sign) in [(Side::Lhs, Sign::Plus), (Side::Rhs, Sign::Minus)] {
        if let Some(p) = distributable(side.of(ineq), sign, &mut Vec::new()) {
            return Some((side, p));
        }
    }
    None
}

/// Distributes the connective at `path` over its first lattice argument of the right kind.
pub fn distribute_at(ineq: &Inequality, side: Side, path: &[usize]) -> Option<Inequality> {
    let t = side.of(ineq).subterm(path)?;
    let Term::App(c, args) = t else { return None };
    let i = args.iter().enumerate().position(|(i, a)| match (c.family, c.polarity(i)) {
        (Family::F, Polarity::Pos) | (Family::G, Polarity::Neg) => matches!(a, Term::Join(..)),
        (Family::F, Polarity::Neg) | (Family::G, Polarity::Pos) => matches!(a, Term::Meet(..)),
    })?;
    let (Term::Join(x, y) | Term::Meet(x, y)) = &args[i] else { unreachable!() };
    let with = |v: &Term| {
        let mut a = args.clone();
        a[i] = v.clone();
        Term::App(c.clone(), a)
    };
    let rewritten = match c.family {
        Family::F => Term::join(with(x), with(y)),
        Family::G => Term::meet(with(x), with(y)),
    };
    let mut out = ineq.clone();
    *side.of_mut(&mut out) = side.of(ineq).replace_at(path, rewritten)?;
    Some(out)
}

pub fn distribute(ineq: &Inequality) -> Inequality {
    let mut cur = ineq.clone();
    while let Some((side, path)) = distribution_site(&cur) {
        cur = distribute_at(&cur, side, &path).expect("site found");
    }
    cur
}

/// One top-level splitting step.
pub fn split_once(ineq: &Inequality) -> Option<(Inequality, Inequality)> {
    match (&ineq.lhs, &ineq.rhs) {
        (a, Term::Meet(b, c)) => Some((Inequality::new(a.clone(), (**b).clone()), Inequality::new(a.clone(), (**c).clone()))),
        (Term::Join(a, b), c) => Some((Inequality::new((**a).clone(), c.clone()), Inequality::new((**b).clone(), c.clone()))),
        _ => None,
    }
}

pub fn split(ineq: &Inequality) -> Vec<Inequality> {
    match split_once(ineq) {
        Some((a, b)) => {
            let mut out = split(&a);
            out.extend(split(&b));
            out
        }
        None => vec![ineq.clone()],
    }
}

fn as_systems(items: &[Inequality]) -> Vec<System> {
    items.iter().cloned().map(System::new).collect()
}

/// Applies one preprocessing rule to the working list.
pub fn apply_preprocess_step(items: &[Inequality], rule: Rule, position: &Position) -> Option<Vec<Inequality>> {
    let mut out = items.to_vec();
    match (rule, position) {
        (Rule::ElimMonotone, Position::Letter { index: Some(i), letter }) => {
            out[*i] = eliminate_monotone_letter(items.get(*i)?, letter)?;
        }
        (Rule::Distribute, Position::Node { index: Some(i), side, path }) => {
            out[*i] = distribute_at(items.get(*i)?, *side, path)?;
        }
        (Rule::Split, Position::Item { index }) => {
            let (a, b) = split_once(items.get(*index)?)?;
            out.splice(*index..=*index, [a, b]);
        }
        (Rule::Star, Position::Item { index }) => {
            let i = items.get(*index)?;
            out[*index] = i.star();
        }
        _ => return None,
    }
    Some(out)
}

/// Stage 1 with a step-by-step trace. Returns the pre-star inequalities, the
/// initial systems, and the steps.
pub fn preprocess_traced(ineq: &Inequality) -> (Vec<Inequality>, Vec<System>, Vec<DerivationStep>) {
    let mut items = vec![ineq.clone()];
    let mut steps = Vec::new();
    let mut apply = |items: &mut Vec<Inequality>, rule: Rule, position: Position| {
        let after = apply_preprocess_step(items, rule, &position).expect("rule applies at the chosen site");
        steps.push(DerivationStep { rule, position, before: as_systems(items), after: as_systems(&after) });
        *items = after;
    };

    while let Some((p, _)) = monotone_letter(&items[0]) {
        apply(&mut items, Rule::ElimMonotone, Position::Letter { index: Some(0), letter: p });
    }
    while let Some((side, path)) = distribution_site(&items[0]) {
        apply(&mut items, Rule::Distribute, Position::Node { index: Some(0), side, path });
    }
    while let Some(i) = items.iter().position(|x| split_once(x).is_some()) {
        apply(&mut items, Rule::Split, Position::Item { index: i });
    }
    for i in 0..items.len() {
        while let Some((p, _)) = monotone_letter(&items[i]) {
            apply(&mut items, Rule::ElimMonotone, Position::Letter { index: Some(i), letter: p });
        }
    }
    let pre_star = items.clone();
    for i in 0..items.len() {
        if items[i].star() != items[i] {
            apply(&mut items, Rule::Star, Position::Item { index: i });
        }
    }
    (pre_star, as_systems(&items), steps)
}

pub fn preprocess(ineq: &Inequality) -> Vec<System> {
    preprocess_traced(ineq).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_inequality, Signature};

    fn ineq(text: &str) -> Inequality {
        parse_inequality(text, &Signature::default_unary()).unwrap()
    }

    #[test]
    fn monotone_elimination() {
        assert_eq!(eliminate_monotone(&ineq("nu X. g(X) <= g(p)")), ineq("nu X. g(X) <= g(bot)"));
        assert_eq!(eliminate_monotone(&ineq("f(p) <= g(p)")), ineq("f(p) <= g(p)"));
        assert_eq!(eliminate_monotone(&ineq("f(q) <= g(p)")), ineq("f(top) <= g(bot)"));
    }

    #[test]
    fn distribution() {
        assert_eq!(distribute(&ineq("f(p \\/ q) <= r")), ineq("f(p) \\/ f(q) <= r"));
        assert_eq!(distribute(&ineq("r <= g(p /\\ q)")), ineq("r <= g(p) /\\ g(q)"));
        assert_eq!(distribute(&ineq("f(p) <= q")), ineq("f(p) <= q"));
        // Not at the wrong sign, and not inside binders.
        assert_eq!(distribute(&ineq("r <= f(p \\/ q)")), ineq("r <= f(p \\/ q)"));
        assert_eq!(distribute(&ineq("mu X. f(p \\/ X) <= r")), ineq("mu X. f(p \\/ X) <= r"));
    }

    #[test]
    fn splitting() {
        assert_eq!(split(&ineq("f(p) \\/ (nu X. g(X)) <= g(p)")), vec![ineq("f(p) <= g(p)"), ineq("nu X. g(X) <= g(p)")]);
        assert_eq!(split(&ineq("p <= q /\\ r")), vec![ineq("p <= q"), ineq("p <= r")]);
        assert_eq!(split(&ineq("p <= q")), vec![ineq("p <= q")]);
    }

    #[test]
    fn pipeline() {
        let out = preprocess(&ineq("f(p) \\/ (nu X. g(X)) <= g(p)"));
        assert_eq!(out, vec![System::new(ineq("f(p) <= g(p)")), System::new(ineq("nu* X. g(X) <= g(bot)"))]);
        assert_eq!(preprocess(&ineq("f(p) <= g(p)")), vec![System::new(ineq("f(p) <= g(p)"))]);
        assert_eq!(preprocess(&ineq("mu X. (p \\/ f(X)) <= g(p)")), vec![System::new(ineq("mu* X. (p \\/ f(X)) <= g(p)"))]);
    }

    #[test]
    fn traced_steps_replay() {
        let input = ineq("f(p \\/ q) \\/ (nu X. g(X)) <= g(p)");
        let (_, systems, steps) = preprocess_traced(&input);
        let mut items = vec![input];
        for s in &steps {
            items = apply_preprocess_step(&items, s.rule, &s.position).unwrap();
            assert_eq!(as_systems(&items), s.after);
        }
        assert_eq!(as_systems(&items), systems);
    }
}
