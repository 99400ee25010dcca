//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --release --test acceptance -- --nocapture` to see the lines.

use std::sync::OnceLock;

use mu_alba::algebra::{Elem, FiniteLE};
use mu_alba::selftest::{CriterionResult, SelftestConfig, Suite};

fn suite() -> &'static Suite {
    static SUITE: OnceLock<Suite> = OnceLock::new();
    SUITE.get_or_init(|| Suite::new(SelftestConfig::default()))
}

fn report(r: CriterionResult) {
    println!("{}", r.line());
    assert!(r.passed, "{}", r.line());
}

/// Independent oracle for the golden outputs: direct loops over the tables of
/// `f` and `g`, with the least fixed point computed by plain iteration.
mod oracle {
    use super::*;

    pub struct Ops<'a> {
        pub le: &'a FiniteLE,
    }

    impl Ops<'_> {
        pub fn n(&self) -> usize {
            self.le.lattice().size()
        }
        pub fn leq(&self, a: Elem, b: Elem) -> bool {
            self.le.lattice().leq(a, b)
        }
        pub fn join(&self, a: Elem, b: Elem) -> Elem {
            self.le.lattice().join(a, b)
        }
        pub fn f(&self, a: Elem) -> Elem {
            self.le.table("f").unwrap().values[a]
        }
        pub fn g(&self, a: Elem) -> Elem {
            self.le.table("g").unwrap().values[a]
        }
        /// Least fixed point of x -> a \/ f(x), by iteration from bottom.
        pub fn lfp(&self, a: Elem) -> Elem {
            let mut x = self.le.lattice().bot();
            loop {
                let next = self.join(a, self.f(x));
                if next == x {
                    return x;
                }
                x = next;
            }
        }
        pub fn gfp_g(&self) -> Elem {
            let mut x = self.le.lattice().top();
            loop {
                let next = self.g(x);
                if next == x {
                    return x;
                }
                x = next;
            }
        }
        pub fn forall(&self, mut p: impl FnMut(Elem) -> bool) -> bool {
            (0..self.n()).all(&mut p)
        }
    }

    /// (input valid, expected output valid) for each golden example.
    pub fn golden(le: &FiniteLE) -> [(bool, bool); 3] {
        let o = Ops { le };
        let bot = le.lattice().bot();
        // f(p) <= g(p)  vs  j <= m => f(j) <= g(m)
        let in1 = o.forall(|p| o.leq(o.f(p), o.g(p)));
        let out1 = o.forall(|j| o.forall(|m| !o.leq(j, m) || o.leq(o.f(j), o.g(m))));
        // mu X.(p \/ f(X)) <= g(p)  vs  j <= m => mu X.(j \/ f(X)) <= g(m)
        let in2 = o.forall(|p| o.leq(o.lfp(p), o.g(p)));
        let out2 = o.forall(|j| o.forall(|m| !o.leq(j, m) || o.leq(o.lfp(j), o.g(m))));
        // f(p) \/ nu X.g(X) <= g(p)  vs  the first output and nu X.g(X) <= g(bot)
        let nu = o.gfp_g();
        let in3 = o.forall(|p| o.leq(o.join(o.f(p), nu), o.g(p)));
        let out3 = out1 && o.leq(nu, o.g(bot));
        [(in1, out1), (in2, out2), (in3, out3)]
    }
}

#[test]
fn criterion_1_golden_derivations() {
    report(suite().golden());
}

#[test]
fn criterion_1_golden_outputs_agree_with_independent_oracle() {
    let s = suite();
    let mut checked = 0;
    for le in &s.corpus {
        for (i, (input, output)) in oracle::golden(le).into_iter().enumerate() {
            assert_eq!(input, output, "golden example {} on {}", i + 1, le.name);
            checked += 1;
        }
    }
    println!("PASS [1] golden outputs against the hand-written oracle: {checked} checks");
}

#[test]
fn criterion_2_oracle_equivalence() {
    report(suite().oracle_equivalence());
}

#[test]
fn criterion_2_corpus_composition() {
    let s = suite();
    let mut per_lattice = std::collections::BTreeMap::<String, usize>::new();
    for le in &s.corpus {
        *per_lattice.entry(le.lattice().name().to_string()).or_default() += 1;
    }
    for name in ["chain2", "chain3", "chain4", "chain5", "2^2", "2^3", "M3", "N5"] {
        let n = per_lattice.get(name).copied().unwrap_or(0);
        // On the 2-chain each of f, g, h, k has exactly two normal tables, so 16 sets exhaust it.
        assert!(n >= 20 || (name == "chain2" && n == 16), "{name}: {n} algebras");
    }
    println!("PASS [2] corpus composition: {per_lattice:?}");
}

#[test]
fn criterion_3_step_soundness() {
    report(suite().step_soundness());
}

#[test]
fn criterion_4_success() {
    report(suite().success());
}

#[test]
fn criterion_5_classifier() {
    report(suite().classifier());
}

#[test]
fn criterion_6_semantics() {
    report(suite().semantics());
}

#[test]
fn criterion_7_round_trip_and_replay() {
    report(suite().round_trip());
}
