//! Property tests over randomly generated terms and inequalities.

use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mu_alba::algebra::{enumerate_les, evaluate, Assignment, CorpusConfig, FiniteLE};
use mu_alba::classifier::{classify_inequality, ClassName};
use mu_alba::engine::{ackermann_right, invert_residuation, residuate, syntactic_shape, Side, System};
use mu_alba::gen::{random_term, rich_signature, TermGen};
use mu_alba::syntax::{
    fresh_fpvar, parse_inequality, parse_term, Inequality, Language, Signature, Term, Var,
};

fn sig() -> &'static Signature {
    static SIG: OnceLock<Signature> = OnceLock::new();
    SIG.get_or_init(rich_signature)
}

fn tense() -> &'static Signature {
    static SIG: OnceLock<Signature> = OnceLock::new();
    SIG.get_or_init(|| rich_signature().tense().unwrap())
}

fn corpus() -> &'static [FiniteLE] {
    static C: OnceLock<Vec<FiniteLE>> = OnceLock::new();
    C.get_or_init(|| enumerate_les(sig(), CorpusConfig { max_size: 5, budget: 3, seed: 11 }))
}

fn term(seed: u64, cfg: &TermGen, s: &Signature) -> Term {
    random_term(&mut ChaCha8Rng::seed_from_u64(seed), s, cfg)
}

fn full(letters: usize, depth: usize) -> TermGen {
    TermGen { nominals: true, residuals: true, ..TermGen::l1(letters, depth) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_then_parsing_is_identity(seed in any::<u64>(), depth in 0usize..6) {
        let t = term(seed, &full(3, depth), tense());
        let back = parse_term(&t.to_string(), tense()).unwrap();
        prop_assert_eq!(&back, &t);
        let st = t.star();
        prop_assert_eq!(parse_term(&st.to_string(), tense()).unwrap(), st);
    }

    #[test]
    fn residuation_is_an_involution(seed in any::<u64>(), depth in 0usize..4, coord in 0usize..2, right in any::<bool>()) {
        let cfg = TermGen { binders: vec![], ..full(2, depth) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_term(&mut rng, tense(), &cfg);
        let b = random_term(&mut rng, tense(), &cfg);
        let other = random_term(&mut rng, tense(), &cfg);
        // With residuals heading both sides the inverse is ambiguous.
        let residual_head = |t: &Term| matches!(t, Term::App(c, _) if c.is_residual());
        prop_assume!(![&a, &b, &other].into_iter().any(residual_head));
        let (head, side) = if right { ("k", Side::Rhs) } else { ("h", Side::Lhs) };
        let app = parse_term(&format!("{head}(a_, b_)").replace("a_", &a.to_string()).replace("b_", &b.to_string()), tense());
        let app = app.unwrap();
        let ineq = if right { Inequality::new(other, app) } else { Inequality::new(app, other) };
        let res = residuate(&ineq, side, coord, tense()).unwrap();
        prop_assert_ne!(&res, &ineq);
        prop_assert_eq!(invert_residuation(&res, tense()), Some(ineq));
    }

    #[test]
    fn ackermann_only_touches_members_containing_the_letter(seed in any::<u64>(), n in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q_only = TermGen { letters: vec!["q".into()], binders: vec![], ..full(1, 3) };
        let pq = TermGen { letters: vec!["p".into(), "q".into()], binders: vec![], nominals: true, ..TermGen::l1(2, 3) };
        let mut sys = System::new(Inequality::new(random_term(&mut rng, tense(), &pq), Term::CoNom(1)));
        sys.s.push(Inequality::new(Term::Nom(1), Term::prop("p")));
        let untouched: Vec<Inequality> = (0..n)
            .map(|_| Inequality::new(random_term(&mut rng, tense(), &q_only), random_term(&mut rng, tense(), &q_only)))
            .collect();
        sys.s.extend(untouched.iter().cloned());
        if let Ok(after) = ackermann_right(&sys, "p") {
            for m in &untouched {
                prop_assert!(after.s.contains(m), "{} lost", m);
            }
            prop_assert!(!after.ineq.contains_prop("p"));
            prop_assert!(after.s.iter().all(|m| !m.contains_prop("p")));
            prop_assert_eq!(after.s.len(), untouched.len());
        }
    }

    #[test]
    fn substitution_never_captures(seed in any::<u64>(), depth in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = TermGen::l1(2, depth);
        let body = random_term(&mut rng, sig(), &cfg);
        // `X` free in the replacement; the target may bind its own `X`.
        let replacement = Term::join(Term::fpvar("X"), random_term(&mut rng, sig(), &cfg));
        let out = body.substitute(&Var::Prop("p".into()), &replacement);
        if body.contains_prop("p") {
            prop_assert!(out.free_fpvars().contains("X"));
        } else {
            prop_assert_eq!(&out, &body);
        }
    }

    #[test]
    fn fresh_names_avoid_the_given_set(names in proptest::collection::btree_set("[XYZ][0-9]?", 0..12), base in "[XYZ][0-9]?") {
        let fresh = fresh_fpvar(&base, &names);
        prop_assert!(!names.contains(&fresh));
        prop_assert!(fresh.starts_with(base.trim_end_matches(|c: char| c.is_ascii_digit())));
    }

    #[test]
    fn open_implies_almost_open_and_closed_implies_almost_closed(seed in any::<u64>(), depth in 0usize..6) {
        let t = term(seed, &full(3, depth), tense()).star();
        let s = syntactic_shape(&t).unwrap();
        prop_assert!(!s.open || s.almost_open);
        prop_assert!(!s.closed || s.almost_closed);
    }

    #[test]
    fn positivity_means_monotone_evaluation(seed in any::<u64>(), depth in 1usize..5, which in 0usize..64) {
        let t = term(seed, &TermGen::l1(2, depth), sig());
        let le = &corpus()[which % corpus().len()];
        let l = le.lattice();
        let p = Var::Prop("p".into());
        let pol = t.positivity(&p);
        let at = |a, q| -> usize {
            let v: Assignment = [(p.clone(), a), (Var::Prop("q".into()), q)].into_iter().collect();
            evaluate(le, &t, &v).unwrap()
        };
        for q in 0..l.size() {
            for a in 0..l.size() {
                for b in 0..l.size() {
                    if !l.leq(a, b) {
                        continue;
                    }
                    if pol.is_positive() {
                        prop_assert!(l.leq(at(a, q), at(b, q)), "{} not monotone on {}", t, le.name);
                    }
                    if pol.is_negative() {
                        prop_assert!(l.leq(at(b, q), at(a, q)), "{} not antitone on {}", t, le.name);
                    }
                }
            }
        }
    }

    #[test]
    fn class_inclusions_hold(seed in any::<u64>(), depth in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = TermGen::l1(2, depth);
        let ineq = Inequality::new(random_term(&mut rng, sig(), &cfg), random_term(&mut rng, sig(), &cfg));
        prop_assume!(ineq.in_language(Language::L1));
        let r = classify_inequality(&ineq).unwrap();
        prop_assert!(!r.holds(ClassName::Tame) || r.holds(ClassName::Inductive));
        prop_assert!(!r.holds(ClassName::Restricted) || r.holds(ClassName::Inductive));
        prop_assert!(!r.holds(ClassName::Inductive) || r.holds(ClassName::Recursive));
    }
}

#[test]
fn ackermann_property_is_not_vacuous() {
    let sys = System {
        s: vec![parse_inequality("j1 <= p", tense()).unwrap(), parse_inequality("q <= g(q)", tense()).unwrap()],
        ineq: parse_inequality("f(p) \\/ q <= m1", tense()).unwrap(),
    };
    let after = ackermann_right(&sys, "p").unwrap();
    assert_eq!(after.ineq.to_string(), "(f(j1) \\/ q) <= m1");
}
