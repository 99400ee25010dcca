//! The built-in acceptance suite, shared by the `selftest` command and the
//! acceptance test target.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{enumerate_les, Compiled, CorpusConfig, FiniteLE, Route};
use crate::classifier::{classify_inequality_with, validate_witness, ClassName};
use crate::engine::{replay, run, Mode, RunConfig, RunOutcome, Trace};
use crate::gen::{
    class_members, random_fixpoint_term, random_inequality, random_term, rich_signature, ClassGen, Target, TermGen,
};
use crate::par::Exec;
use crate::syntax::{parse_inequality, parse_quasi, parse_term, BinderKind, Inequality, QuasiInequality, Signature};
use crate::verify::{check_reduction, check_steps};

#[derive(Debug, Clone)]
pub struct SelftestConfig {
    pub max_size: usize,
    pub budget: usize,
    pub seed: u64,
    pub exec: Exec,
    /// Generated members per class for the success criterion.
    pub per_class: usize,
    /// Generated restricted inequalities for the equivalence criterion.
    pub oracle_inputs: usize,
    pub classifier_samples: usize,
    pub roundtrip_terms: usize,
    pub fixpoint_terms: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            max_size: 8,
            budget: 20,
            seed: crate::algebra::seed_from_env(),
            exec: Exec::default(),
            per_class: 100,
            oracle_inputs: 50,
            classifier_samples: 500,
            roundtrip_terms: 1000,
            fixpoint_terms: 50,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(serialize_with = "millis")]
    pub elapsed: Duration,
}

fn millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u128(d.as_millis())
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Shared state: the signature, the corpus, and the generated inputs.
pub struct Suite {
    pub cfg: SelftestConfig,
    pub sig: Signature,
    pub corpus: Vec<FiniteLE>,
}

/// The three reference derivations: input, mode, expected outputs.
pub const GOLDEN: [(&str, Mode, &[&str]); 3] = [
    ("f(p) <= g(p)", Mode::Proper, &["j1 <= m1 => f(j1) <= g(m1)"]),
    ("mu X. (p \\/ f(X)) <= g(p)", Mode::Proper, &["j1 <= m1 => mu* X. (j1 \\/ f(X)) <= g(m1)"]),
    ("f(p) \\/ (nu X. g(X)) <= g(p)", Mode::Tame, &["j1 <= m1 => f(j1) <= g(m1)", "=> nu* X. g(X) <= g(bot)"]),
];

fn timed(id: u8, title: &'static str, f: impl FnOnce() -> Result<String, String>) -> CriterionResult {
    let t = Instant::now();
    let r = f();
    let elapsed = t.elapsed();
    let (passed, detail) = match r {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult { id, title, passed, detail, elapsed }
}

impl Suite {
    pub fn new(cfg: SelftestConfig) -> Self {
        let sig = rich_signature();
        let corpus =
            enumerate_les(&sig, CorpusConfig { max_size: cfg.max_size, budget: cfg.budget, seed: cfg.seed });
        Suite { cfg, sig, corpus }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ salt.wrapping_mul(0x2545_f491_4f6c_dd1d))
    }

    fn run_mode(&self, ineq: &Inequality, mode: Mode) -> RunOutcome {
        run(ineq, &self.sig, &RunConfig { mode, exec: self.cfg.exec, ..RunConfig::default() }).expect("L1 input")
    }

    fn golden_inputs(&self) -> Vec<(Inequality, Mode)> {
        GOLDEN.iter().map(|(t, m, _)| (parse_inequality(t, &self.sig).expect("golden parses"), *m)).collect()
    }

    pub fn generated(&self, target: Target, n: usize, salt: u64) -> Vec<Inequality> {
        let cfg = ClassGen { target, letters: 2, depth: 3, binary: true };
        class_members(&mut self.rng(salt), &self.sig, &cfg, n)
    }

    pub fn golden(&self) -> CriterionResult {
        timed(1, "golden derivations", || {
            let tsig = self.sig.tense().map_err(|e| e.to_string())?;
            for (text, mode, expected) in GOLDEN {
                let t = Instant::now();
                let ineq = parse_inequality(text, &self.sig).map_err(|e| e.to_string())?;
                let o = self.run_mode(&ineq, mode);
                let got = o.output().ok_or_else(|| format!("`{text}` failed: {:?}", o.failure_reason()))?;
                let want: Vec<QuasiInequality> =
                    expected.iter().map(|e| parse_quasi(e, &tsig).expect("expected output parses")).collect();
                if got != want {
                    let shown: Vec<String> = got.iter().map(ToString::to_string).collect();
                    return Err(format!("`{text}` gave {shown:?}"));
                }
                if t.elapsed() > Duration::from_secs(1) {
                    return Err(format!("`{text}` took {:?}", t.elapsed()));
                }
            }
            let tame_fail = self.run_mode(&self.golden_inputs()[1].0, Mode::Tame);
            if tame_fail.is_success() {
                return Err("tame run on the mu example should fail".into());
            }
            Ok("3 reference outputs matched; tame run on the mu example fails as required".into())
        })
    }

    pub fn oracle_equivalence(&self) -> CriterionResult {
        timed(2, "oracle equivalence of input and output", || {
            let mut inputs = self.golden_inputs();
            let generated = self.generated(Target::Restricted, self.cfg.oracle_inputs, 2);
            if generated.len() < self.cfg.oracle_inputs {
                return Err(format!("generator produced only {} inputs", generated.len()));
            }
            inputs.extend(generated.into_iter().map(|g| (g, Mode::Proper)));
            for (ineq, mode) in &inputs {
                let o = self.run_mode(ineq, *mode);
                let out = o.output().ok_or_else(|| format!("`{ineq}` failed: {:?}", o.failure_reason()))?;
                let r = check_reduction(ineq, &out, &self.corpus, self.cfg.exec).map_err(|e| e.to_string())?;
                if let Some(d) = r.discrepancies.first() {
                    return Err(format!("`{ineq}`: discrepancy on {} ({:?})", d.algebra, d.counterexample.assignment));
                }
            }
            Ok(format!("{} inputs x {} algebras, 0 discrepancies", inputs.len(), self.corpus.len()))
        })
    }

    pub fn step_soundness(&self) -> CriterionResult {
        timed(3, "per-step soundness", || {
            let mut inputs = self.golden_inputs();
            inputs.extend(self.generated(Target::Restricted, 40, 3).into_iter().map(|g| (g, Mode::Proper)));
            inputs.extend(self.generated(Target::Tame, 40, 4).into_iter().map(|g| (g, Mode::Tame)));
            let mut rng = self.rng(5);
            for _ in 0..60 {
                let x = random_inequality(&mut rng, &self.sig, &TermGen::l1(2, 3));
                inputs.push((x.clone(), Mode::Proper));
                inputs.push((x, Mode::Tame));
            }
            let mut steps = 0;
            for (ineq, mode) in &inputs {
                let o = self.run_mode(ineq, *mode);
                steps += o.preprocess_steps.len() + o.systems.iter().map(|s| s.steps.len()).sum::<usize>();
                let bad = check_steps(&o, &self.corpus, self.cfg.exec).map_err(|e| e.to_string())?;
                if let Some(b) = bad.first() {
                    return Err(format!("`{ineq}`: {} step {} is unsound on {}", b.rule, b.step, b.report.discrepancies[0].algebra));
                }
            }
            Ok(format!("{steps} steps from {} runs, all sound on {} algebras", inputs.len(), self.corpus.len()))
        })
    }

    pub fn success(&self) -> CriterionResult {
        timed(4, "run success on generated class members", || {
            let n = self.cfg.per_class;
            let mut summary = Vec::new();
            for (target, mode, salt) in [(Target::Restricted, Mode::Proper, 6), (Target::Tame, Mode::Tame, 7)] {
                let xs = self.generated(target, n, salt);
                if xs.len() < n {
                    return Err(format!("{target:?}: generator produced only {}", xs.len()));
                }
                for x in &xs {
                    let o = self.run_mode(x, mode);
                    if !o.is_success() {
                        return Err(format!("{target:?} `{x}` failed: {}", o.failure_reason().unwrap_or_default()));
                    }
                }
                summary.push(format!("{} {target:?}", xs.len()));
            }
            Ok(format!("100% success ({})", summary.join(", ")))
        })
    }

    pub fn classifier(&self) -> CriterionResult {
        timed(5, "classifier inclusions and witnesses", || {
            let mut rng = self.rng(8);
            let mut positives = 0;
            for _ in 0..self.cfg.classifier_samples {
                let x = random_inequality(&mut rng, &self.sig, &TermGen::l1(3, 5));
                let r = classify_inequality_with(&x, self.cfg.exec).map_err(|e| e.to_string())?;
                let h = |c| r.holds(c);
                if (h(ClassName::Tame) && !h(ClassName::Inductive))
                    || (h(ClassName::Restricted) && !h(ClassName::Inductive))
                    || (h(ClassName::Inductive) && !h(ClassName::Recursive))
                {
                    return Err(format!("inclusion violated on `{x}`"));
                }
                for class in ClassName::ALL {
                    for w in &r.verdict(class).witnesses {
                        positives += 1;
                        if !validate_witness(&x, class, w) {
                            return Err(format!("{class:?} witness {w:?} does not re-validate on `{x}`"));
                        }
                    }
                }
            }
            let g = parse_inequality("g(f(p)) <= f(g(p))", &self.sig).map_err(|e| e.to_string())?;
            let r = classify_inequality_with(&g, self.cfg.exec).map_err(|e| e.to_string())?;
            if r.holds(ClassName::Recursive) {
                return Err("g(f(p)) <= f(g(p)) classified as recursive".into());
            }
            Ok(format!("{} inequalities, {positives} witnesses re-validated", self.cfg.classifier_samples))
        })
    }

    pub fn semantics(&self) -> CriterionResult {
        timed(6, "fixed point and residual semantics", || {
            let mut rng = self.rng(9);
            let mut terms = Vec::new();
            for i in 0..self.cfg.fixpoint_terms {
                let kind = if i % 2 == 0 { BinderKind::Mu } else { BinderKind::Nu };
                terms.push(random_fixpoint_term(&mut rng, &self.sig, 2, 3, kind));
            }
            for le in &self.corpus {
                le.check_adjunctions().map_err(|e| format!("{}: {e}", le.name))?;
                for t in &terms {
                    let variants = [
                        t.clone(),
                        t.with_binders(BinderKind::Mu2, BinderKind::Nu2),
                        t.with_binders(BinderKind::MuStar, BinderKind::NuStar),
                    ];
                    let refs: Vec<_> = variants.iter().collect();
                    let c = Compiled::new(le, &refs).map_err(|e| e.to_string())?;
                    let mut bad = None;
                    c.for_each_assignment(|env| {
                        let base = c.eval(0, env, Route::Iteration);
                        let ok = (0..3).all(|i| {
                            c.eval(i, env, Route::Iteration) == base && c.eval(i, env, Route::Extremal) == base
                        });
                        if !ok {
                            bad = Some(c.describe(env));
                        }
                        ok
                    });
                    if let Some(a) = bad {
                        return Err(format!("`{t}` on {}: routes or binder kinds disagree at {a:?}", le.name));
                    }
                }
            }
            Ok(format!("{} terms on {} algebras; adjunctions hold", terms.len(), self.corpus.len()))
        })
    }

    pub fn round_trip(&self) -> CriterionResult {
        timed(7, "print/parse round trip and trace replay", || {
            let tsig = self.sig.tense().map_err(|e| e.to_string())?;
            let cfg = TermGen {
                binders: BinderKind::ALL.to_vec(),
                nominals: true,
                residuals: true,
                ..TermGen::l1(3, 5)
            };
            let mut rng = self.rng(10);
            for _ in 0..self.cfg.roundtrip_terms {
                let t = random_term(&mut rng, &tsig, &cfg);
                let back = parse_term(&t.to_string(), &tsig).map_err(|e| format!("`{t}`: {e}"))?;
                if back != t {
                    return Err(format!("`{t}` reparsed as `{back}`"));
                }
            }
            let mut inputs = self.golden_inputs();
            inputs.extend(self.generated(Target::Restricted, 20, 11).into_iter().map(|g| (g, Mode::Proper)));
            inputs.extend(self.generated(Target::Tame, 20, 12).into_iter().map(|g| (g, Mode::Tame)));
            for (ineq, mode) in &inputs {
                let o = self.run_mode(ineq, *mode);
                let json = Trace::from_outcome(&o).to_json();
                let trace = Trace::from_json(&json).map_err(|e| e.to_string())?;
                let replayed = replay(&trace, &self.sig).map_err(|e| format!("`{ineq}`: {e}"))?;
                let text = |v: &Option<Vec<QuasiInequality>>| v.as_ref().map(|v| v.iter().map(ToString::to_string).collect::<Vec<_>>());
                if text(&replayed) != text(&o.output()) {
                    return Err(format!("`{ineq}`: replayed output differs"));
                }
            }
            Ok(format!("{} terms round-tripped; {} traces replayed exactly", self.cfg.roundtrip_terms, inputs.len()))
        })
    }

    pub fn all(&self) -> Vec<CriterionResult> {
        vec![
            self.golden(),
            self.oracle_equivalence(),
            self.step_soundness(),
            self.success(),
            self.classifier(),
            self.semantics(),
            self.round_trip(),
        ]
    }
}
