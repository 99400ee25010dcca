use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mu_alba::algebra::{enumerate_les, AlgebraFile, CorpusConfig, FiniteLE};
use mu_alba::classifier::{classify_inequality, ClassName, ClassReport, Epsilon, StrictOrder};
use mu_alba::engine::{run, Mode, RunConfig, RunOutcome, Trace};
use mu_alba::par::Exec;
use mu_alba::selftest::{SelftestConfig, Suite};
use mu_alba::syntax::{parse_inequality, parse_quasi, Inequality, QuasiInequality, Signature};
use mu_alba::verify::{check_reduction, EquivalenceReport};

/// Classify and reduce lattice-based fixed point inequalities, and check the
/// reductions on finite algebras.
#[derive(Parser)]
#[command(name = "alba", version)]
struct Cli {
    /// Signature file (`connective f : F / 1 / (1);` per line). Default: unary f and g.
    #[arg(long, global = true)]
    sig: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Report the recursive / inductive / restricted / tame verdicts.
    Classify(InputArgs),
    /// Run the reduction and print the pure quasi-inequalities.
    Reduce {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Print the full derivation.
        #[arg(long)]
        trace: bool,
    },
    /// Reduce, then compare input and output validity on a corpus of finite algebras.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        oracle: OracleArgs,
        /// Single algebra file (JSON) instead of the built-in corpus.
        #[arg(long)]
        alg: Option<PathBuf>,
        /// Check the output recorded in this trace file instead of reducing.
        #[arg(long)]
        from_trace: Option<PathBuf>,
    },
    /// Run the built-in acceptance suite.
    Selftest {
        #[command(flatten)]
        oracle: OracleArgs,
    },
}

#[derive(Args)]
struct InputArgs {
    /// The inequality, e.g. "mu X. (p \/ f(X)) <= g(p)".
    inequality: Option<String>,
    /// Read the inequality from a file instead.
    #[arg(long, conflicts_with = "inequality")]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Proper)]
    mode: ModeArg,
    /// Enforce the pivotal restriction on every approximation.
    #[arg(long)]
    pivotal: bool,
    /// Strategy order-type, e.g. "p=1,q=d". Classified automatically when absent.
    #[arg(long)]
    epsilon: Option<String>,
    /// Strategy order on letters, e.g. "q<p".
    #[arg(long)]
    omega: Option<String>,
    /// Disable data parallelism.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Tame,
    Proper,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 8)]
    max_size: usize,
    #[arg(long, default_value_t = 20)]
    budget: usize,
}

/// Usage or input problem (exit 2).
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn signature(cli: &Cli) -> Result<Signature, Usage> {
    match &cli.sig {
        None => Ok(Signature::default_unary()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Usage(format!("{}: {e}", p.display())))?;
            Ok(Signature::parse_file(&text)?)
        }
    }
}

fn read_input(a: &InputArgs, sig: &Signature) -> Result<Inequality, Usage> {
    let text = match (&a.inequality, &a.file) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => std::fs::read_to_string(p).map_err(|e| Usage(format!("{}: {e}", p.display())))?,
        (None, None) => return Err(Usage("no inequality given".into())),
    };
    Ok(parse_inequality(text.trim(), sig)?)
}

fn run_config(a: &RunArgs) -> Result<RunConfig, Usage> {
    Ok(RunConfig {
        mode: match a.mode {
            ModeArg::Tame => Mode::Tame,
            ModeArg::Proper => Mode::Proper,
        },
        pivotal: a.pivotal,
        epsilon: a.epsilon.as_deref().map(Epsilon::parse).transpose().map_err(Usage)?,
        omega: a.omega.as_deref().map(StrictOrder::parse).transpose().map_err(Usage)?,
        exec: if a.sequential { Exec::Sequential } else { Exec::Parallel },
    })
}

fn dispatch(cli: &Cli) -> Result<u8, Usage> {
    let sig = signature(cli)?;
    match &cli.command {
        Command::Classify(input) => {
            let ineq = read_input(input, &sig)?;
            let report = classify_inequality(&ineq)?;
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
                Format::Text => print_report(&report),
            }
            Ok(0)
        }
        Command::Reduce { input, run: r, trace } => {
            let ineq = read_input(input, &sig)?;
            let outcome = run(&ineq, &sig, &run_config(r)?)?;
            print_outcome(&outcome, cli.format, *trace)?;
            Ok(if outcome.is_success() { 0 } else { 1 })
        }
        Command::Verify { input, run: r, oracle, alg, from_trace } => {
            let ineq = read_input(input, &sig)?;
            let cfg = run_config(r)?;
            let output: Vec<QuasiInequality> = match from_trace {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
                    let trace = Trace::from_json(&text)?;
                    let tsig = sig.tense()?;
                    let recorded = trace.output.ok_or_else(|| Usage("the trace records a failed run".into()))?;
                    recorded.iter().map(|q| parse_quasi(q, &tsig)).collect::<Result<_, _>>()?
                }
                None => {
                    let outcome = run(&ineq, &sig, &cfg)?;
                    match outcome.output() {
                        Some(o) => o,
                        None => {
                            eprintln!("reduction failed: {}", outcome.failure_reason().unwrap_or_default());
                            return Ok(1);
                        }
                    }
                }
            };
            let corpus: Vec<FiniteLE> = match alg {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
                    vec![AlgebraFile::parse(&text, &sig)?]
                }
                None => enumerate_les(&sig, CorpusConfig { max_size: oracle.max_size, budget: oracle.budget, ..Default::default() }),
            };
            let report = check_reduction(&ineq, &output, &corpus, cfg.exec)?;
            print_equivalence(&ineq, &output, &report, cli.format)?;
            Ok(if report.is_equivalent() { 0 } else { 1 })
        }
        Command::Selftest { oracle } => {
            let suite =
                Suite::new(SelftestConfig { max_size: oracle.max_size, budget: oracle.budget, ..SelftestConfig::default() });
            let results = suite.all();
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&results)?),
                Format::Text => {
                    for r in &results {
                        println!("{}", r.line());
                    }
                    let passed = results.iter().filter(|r| r.passed).count();
                    println!("{passed}/{} criteria passed", results.len());
                }
            }
            Ok(if results.iter().all(|r| r.passed) { 0 } else { 1 })
        }
    }
}

fn print_report(r: &ClassReport) {
    println!("{}: {}", r.inequality, r.summary);
    for class in ClassName::ALL {
        let v = r.verdict(class);
        match v.witnesses.first() {
            Some(w) => {
                let omega = if w.omega.is_empty() { "{}".to_string() } else { w.omega.to_string() };
                println!("  {:<21} yes  epsilon=({}) omega={omega}", class.label(), w.epsilon);
            }
            None => {
                let why = v.failures.first().map(|f| {
                    let path: Vec<String> = f.branch.iter().map(|(l, s)| format!("{}{l}", sign_char(*s))).collect();
                    format!("epsilon=({}): {} [{}]", f.epsilon, f.reason, path.join(" "))
                });
                println!("  {:<21} no   {}", class.label(), why.unwrap_or_default());
            }
        }
    }
}

fn sign_char(s: mu_alba::syntax::Sign) -> char {
    match s {
        mu_alba::syntax::Sign::Plus => '+',
        mu_alba::syntax::Sign::Minus => '-',
    }
}

fn print_outcome(o: &RunOutcome, format: Format, trace: bool) -> Result<(), Usage> {
    let t = Trace::from_outcome(o);
    match format {
        Format::Json if trace => println!("{}", t.to_json()),
        Format::Json => {
            let v = json!({ "version": t.version, "input": t.input, "output": t.output, "failure": t.failure });
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        Format::Text => {
            if trace {
                for s in &t.preprocess_steps {
                    println!("[stage 1] {} at {}: {}", s.rule, s.position, s.after.join(" ; "));
                }
                for (i, sys) in t.systems.iter().enumerate() {
                    println!("[system {}] {}  (epsilon=({}) omega={{{}}})", i + 1, sys.initial, sys.witness.epsilon, sys.witness.omega);
                    for s in &sys.steps {
                        println!("  {} at {}: {}", s.rule, s.position, s.after.join(" ; "));
                    }
                }
            }
            match &t.output {
                Some(out) => out.iter().for_each(|q| println!("{q}")),
                None => eprintln!("ALBA failed: {}", t.failure.clone().unwrap_or_default()),
            }
        }
    }
    Ok(())
}

fn print_equivalence(input: &Inequality, output: &[QuasiInequality], r: &EquivalenceReport, format: Format) -> Result<(), Usage> {
    match format {
        Format::Json => {
            let out: Vec<String> = output.iter().map(ToString::to_string).collect();
            let v = json!({ "input": input.to_string(), "output": out, "equivalent": r.is_equivalent(), "report": r });
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        Format::Text => {
            if r.is_equivalent() {
                println!("equivalent on all {} algebras", r.algebras);
            } else {
                println!("NOT equivalent on {} of {} algebras", r.discrepancies.len(), r.algebras);
                let d = &r.discrepancies[0];
                let side = if d.before_valid { "output" } else { "input" };
                let assignment: Vec<String> = d.counterexample.assignment.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!("  witness: {} falsifies the {side} at {}", d.algebra, assignment.join(", "));
            }
        }
    }
    Ok(())
}
