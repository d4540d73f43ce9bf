//! Command-line front end: parse instance files, run the
//! binarize -> minimalize -> solve pipeline, check polymorphisms, classify
//! relations and languages, generate and reduce instances, and benchmark the
//! solvers against the exact oracle.
//!
//! Exit codes are a stable contract: 0 solved, 2 unsatisfiable, 3 input
//! error, 4 enumeration budget exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::Zero;

use mccsp_cli::io;
use mccsp_core::blp::{build_blp_binary, solve_lp_rounding};
use mccsp_core::greedy::solve_greedy;
use mccsp_core::minimal::{binarize, classify_01all, is_trivial, make_23_minimal, BinaryClass};
use mccsp_core::oracle::{solve_exact, ExactOutcome, DEFAULT_BUDGET};
use mccsp_core::poly::{
    dual_discriminator, named_operation, preserves_language, LanguagePreservation, NamedOp,
    Operation, PreservationWitness,
};
use mccsp_core::reduce::{
    classify_permutation_language, gen_random_01all, hypergraph_cover_to_csp, min_uncut_to_csp,
    nearest_codeword_to_csp, Dichotomy,
};
use mccsp_core::{Domain, ExtendedCost, Instance, Relation};

#[derive(Parser)]
#[command(
    name = "mccsp",
    version,
    about = "Minimum-cost CSP toolbox for dual-discriminator constraint languages"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Greedy,
    Lp,
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file with the chosen algorithm.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "greedy")]
        algo: Algo,
        /// Enumeration budget for the exact solver (overrides MCCSP_BUDGET).
        #[arg(long)]
        budget: Option<u64>,
        /// Also run the exact oracle and report the approximation ratio.
        #[arg(long)]
        oracle: bool,
        /// Write the greedy iteration trace as JSON.
        #[arg(long, value_name = "PATH")]
        emit_trace: Option<PathBuf>,
        /// Write the relaxation in plain-text row form.
        #[arg(long, value_name = "PATH")]
        dump_lp: Option<PathBuf>,
    },
    /// Rewrite an instance with binary constraints only.
    Binarize {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Skip the 2-decomposability validation of higher-arity relations.
        #[arg(long)]
        no_validate: bool,
    },
    /// Binarize and run the consistency fixpoint; exits 2 if the result is
    /// trivial (unsatisfiable).
    Minimalize {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        no_validate: bool,
    },
    /// Check whether an operation preserves every relation of a language or
    /// instance file.
    CheckPoly {
        file: PathBuf,
        /// Named operation: dd | switching | missing | wildcard-majority |
        /// proj:N:I | near-proj:K | th:P:N
        #[arg(long, conflicts_with = "op_file")]
        op: Option<String>,
        /// JSON file with an explicit operation table.
        #[arg(long)]
        op_file: Option<PathBuf>,
    },
    /// Classify a binary relation as product / two-fan / bijection, or show
    /// a dual-discriminator violation witness.
    ClassifyBinary {
        file: PathBuf,
        /// Pick a named relation when the file contains several.
        #[arg(long)]
        rel: Option<String>,
    },
    /// Decide constant-factor approximability for a language containing all
    /// permutation relations.
    ClassifyLanguage { file: PathBuf },
    /// Generate instance files.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Reduce a combinatorial problem file to an instance file.
    Reduce {
        #[command(subcommand)]
        what: ReduceCommand,
    },
    /// Run seeded trials through both solvers and the oracle; emits CSV.
    Bench {
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        domain: usize,
        #[arg(long, default_value_t = 6)]
        vars: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 10)]
        cost_max: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        budget: Option<u64>,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Seeded random instance whose constraints the dual discriminator
    /// preserves.
    Random01all {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        domain: usize,
        #[arg(long, default_value_t = 6)]
        vars: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 10)]
        cost_max: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Min UnCut encoding of an edge-list graph file.
    Uncut {
        #[arg(long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Vertex-cover encoding of a uniform hypergraph file.
    Hvc {
        #[arg(long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Nearest-codeword encoding of a parity-check file.
    Ncw {
        #[arg(long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ReduceCommand {
    Uncut {
        #[arg(long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Hvc {
        #[arg(long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Ncw {
        #[arg(long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(3),
            CliError::Budget(_) => ExitCode::from(4),
            CliError::Internal(_) => ExitCode::from(1),
        }
    }
}

impl From<mccsp_core::Error> for CliError {
    fn from(e: mccsp_core::Error) -> Self {
        match e {
            mccsp_core::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            mccsp_core::Error::Invariant(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<io::IoError> for CliError {
    fn from(e: io::IoError) -> Self {
        match e {
            io::IoError::Core(inner) => inner.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

const UNSAT_EXIT: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_output(output: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn budget_from(flag: Option<u64>) -> CliResult<u64> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("MCCSP_BUDGET") {
        Ok(value) => value
            .parse()
            .map_err(|_| CliError::Input(format!("MCCSP_BUDGET=`{value}` is not an integer"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn instance_cost(instance: &Instance, assignment: &mccsp_core::Assignment) -> CliResult<BigRational> {
    let eval = instance
        .evaluate(assignment)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    if !eval.satisfying {
        return Err(CliError::Internal(
            "solver returned a non-satisfying assignment".to_string(),
        ));
    }
    match eval.cost {
        ExtendedCost::Finite(r) => Ok(r),
        ExtendedCost::Infinite => Err(CliError::Internal(
            "solver returned an infinite-cost assignment".to_string(),
        )),
    }
}

fn run(command: Command) -> CliResult<ExitCode> {
    match command {
        Command::Solve {
            file,
            algo,
            budget,
            oracle,
            emit_trace,
            dump_lp,
        } => cmd_solve(&file, algo, budget, oracle, emit_trace, dump_lp),
        Command::Binarize {
            file,
            output,
            no_validate,
        } => {
            let instance = io::instance_from_str(&read_file(&file)?)?;
            let bi = binarize(&instance, !no_validate)?;
            write_output(output.as_ref(), &io::instance_to_string(&bi.to_instance()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Minimalize {
            file,
            output,
            no_validate,
        } => {
            let instance = io::instance_from_str(&read_file(&file)?)?;
            let bi = make_23_minimal(&binarize(&instance, !no_validate)?);
            write_output(output.as_ref(), &io::instance_to_string(&bi.to_instance()))?;
            if is_trivial(&bi) {
                eprintln!("instance is unsatisfiable (trivial after minimalization)");
                Ok(ExitCode::from(UNSAT_EXIT))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::CheckPoly { file, op, op_file } => cmd_check_poly(&file, op, op_file),
        Command::ClassifyBinary { file, rel } => cmd_classify_binary(&file, rel),
        Command::ClassifyLanguage { file } => {
            let lang = io::language_from_str(&read_file(&file)?)?;
            let verdict = classify_permutation_language(&lang)?;
            match verdict {
                Dichotomy::Approximable { ratio } => {
                    eprintln!(
                        "approximable: a coordinate variant of the dual discriminator preserves the language; factor {ratio}"
                    );
                    println!(
                        "{}",
                        serde_json::json!({"verdict": "approximable", "ratio": ratio})
                    );
                }
                Dichotomy::HardNoNu => {
                    eprintln!(
                        "hard: no conservative majority polymorphism, hence no near-unanimity polymorphism"
                    );
                    println!("{}", serde_json::json!({"verdict": "hard-no-nu"}));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { what } => match what {
            GenCommand::Random01all {
                seed,
                domain,
                vars,
                density,
                cost_max,
                output,
            } => {
                let instance = gen_random_01all(seed, domain, vars, density, cost_max)?;
                write_output(output.as_ref(), &io::instance_to_string(&instance))?;
                Ok(ExitCode::SUCCESS)
            }
            GenCommand::Uncut { input, output } => reduce_uncut(&input, output),
            GenCommand::Hvc { input, output } => reduce_hvc(&input, output),
            GenCommand::Ncw { input, output } => reduce_ncw(&input, output),
        },
        Command::Reduce { what } => match what {
            ReduceCommand::Uncut { input, output } => reduce_uncut(&input, output),
            ReduceCommand::Hvc { input, output } => reduce_hvc(&input, output),
            ReduceCommand::Ncw { input, output } => reduce_ncw(&input, output),
        },
        Command::Bench {
            trials,
            seed,
            domain,
            vars,
            density,
            cost_max,
            output,
            budget,
        } => cmd_bench(trials, seed, domain, vars, density, cost_max, output, budget),
    }
}

fn reduce_uncut(input: &Path, output: Option<PathBuf>) -> CliResult<ExitCode> {
    let graph = io::graph_from_str(&read_file(input)?)?;
    let instance = min_uncut_to_csp(&graph)?;
    write_output(output.as_ref(), &io::instance_to_string(&instance))?;
    Ok(ExitCode::SUCCESS)
}

fn reduce_hvc(input: &Path, output: Option<PathBuf>) -> CliResult<ExitCode> {
    let hypergraph = io::hypergraph_from_str(&read_file(input)?)?;
    let instance = hypergraph_cover_to_csp(&hypergraph)?;
    write_output(output.as_ref(), &io::instance_to_string(&instance))?;
    Ok(ExitCode::SUCCESS)
}

fn reduce_ncw(input: &Path, output: Option<PathBuf>) -> CliResult<ExitCode> {
    let code = io::code_from_str(&read_file(input)?)?;
    let instance = nearest_codeword_to_csp(&code)?;
    write_output(output.as_ref(), &io::instance_to_string(&instance))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(
    file: &Path,
    algo: Algo,
    budget: Option<u64>,
    oracle: bool,
    emit_trace: Option<PathBuf>,
    dump_lp: Option<PathBuf>,
) -> CliResult<ExitCode> {
    let budget = budget_from(budget)?;
    let started = Instant::now();
    let instance = io::instance_from_str(&read_file(file)?)?;
    let parse_time = started.elapsed();
    eprintln!(
        "pipeline: parsed {} variables, {} constraints, |D| = {} ({parse_time:.1?})",
        instance.num_vars(),
        instance.constraints.len(),
        instance.domain().size()
    );

    if algo == Algo::Exact {
        let t = Instant::now();
        return match solve_exact(&instance, budget)? {
            ExactOutcome::Solved { optimum, witness } => {
                eprintln!("pipeline: exact optimum {optimum} ({:.1?})", t.elapsed());
                println!(
                    "{}",
                    serde_json::json!({
                        "assignment": io::assignment_to_json(&instance, &witness),
                        "cost": optimum.to_string(),
                    })
                );
                Ok(ExitCode::SUCCESS)
            }
            ExactOutcome::Unsat => {
                eprintln!("pipeline: no satisfying assignment of finite cost");
                println!("{}", serde_json::json!({"status": "unsat"}));
                Ok(ExitCode::from(UNSAT_EXIT))
            }
        };
    }

    let t = Instant::now();
    let rough = binarize(&instance, true)?;
    let bi = make_23_minimal(&rough);
    let pairs_before = rough.materialized_pairs().count();
    let pairs_after = bi.materialized_pairs().count();
    eprintln!(
        "pipeline: binarized ({pairs_before} pairs) and minimalized ({pairs_after} pairs) in {:.1?}",
        t.elapsed()
    );
    if is_trivial(&bi) {
        eprintln!("pipeline: instance is unsatisfiable (trivial after minimalization)");
        println!("{}", serde_json::json!({"status": "unsat"}));
        return Ok(ExitCode::from(UNSAT_EXIT));
    }

    let t = Instant::now();
    let (assignment, cost, extra) = match algo {
        Algo::Greedy => {
            let result = solve_greedy(&bi)?;
            if let Some(path) = emit_trace {
                let trace = io::trace_to_json(&instance.variables, &result);
                fs::write(&path, serde_json::to_string_pretty(&trace).expect("traces serialize"))
                    .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
            }
            let cost = instance_cost(&instance, &result.assignment)?;
            let iterations = result.trace.len();
            (
                result.assignment,
                cost,
                serde_json::json!({"iterations": iterations}),
            )
        }
        Algo::Lp => {
            if let Some(path) = &dump_lp {
                let problem = build_blp_binary(&bi)?;
                fs::write(path, io::lp_to_string(&problem, &instance.variables))
                    .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
            }
            let rounding = solve_lp_rounding(&bi)?;
            let cost = instance_cost(&instance, &rounding.assignment)?;
            (
                rounding.assignment,
                cost,
                serde_json::json!({"lp_value": rounding.lp_value.to_string()}),
            )
        }
        Algo::Exact => unreachable!("handled above"),
    };
    eprintln!("pipeline: solver cost {cost} ({:.1?})", t.elapsed());

    if oracle {
        let t = Instant::now();
        match solve_exact(&instance, budget)? {
            ExactOutcome::Solved { optimum, .. } => {
                let bound = BigRational::from_integer((instance.domain().size() as i64).into());
                if optimum.is_zero() {
                    eprintln!("pipeline: oracle optimum 0 ({:.1?})", t.elapsed());
                } else {
                    let ratio = &cost / &optimum;
                    eprintln!(
                        "pipeline: oracle optimum {optimum}, ratio {ratio} (bound {bound}, {:.1?})",
                        t.elapsed()
                    );
                }
                if cost > bound * &optimum {
                    return Err(CliError::Internal(
                        "approximation guarantee violated".to_string(),
                    ));
                }
            }
            ExactOutcome::Unsat => {
                return Err(CliError::Internal(
                    "oracle disagrees: solver found an assignment but enumeration did not"
                        .to_string(),
                ))
            }
        }
    }

    let mut out = serde_json::json!({
        "assignment": io::assignment_to_json(&instance, &assignment),
        "cost": cost.to_string(),
    });
    if let serde_json::Value::Object(map) = &mut out {
        if let serde_json::Value::Object(extra) = extra {
            map.extend(extra);
        }
    }
    println!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn parse_op_spec(spec: &str, domain: Domain) -> CliResult<Operation> {
    let parts: Vec<&str> = spec.split(':').collect();
    let parse_num = |s: &str| -> CliResult<usize> {
        s.parse()
            .map_err(|_| CliError::Input(format!("bad number `{s}` in operation spec `{spec}`")))
    };
    let op = match parts.as_slice() {
        ["dd"] => Ok(dual_discriminator(domain)),
        ["switching"] => named_operation(&NamedOp::Switching, domain),
        ["missing"] => named_operation(&NamedOp::MissingElement, domain),
        ["wildcard-majority"] => named_operation(&NamedOp::MajorityElseWildcard, domain),
        ["near-proj", k] => named_operation(
            &NamedOp::NearProjection { k: parse_num(k)? },
            domain,
        ),
        ["th", p, n] => named_operation(
            &NamedOp::Threshold {
                p: parse_num(p)?,
                n: parse_num(n)?,
            },
            domain,
        ),
        ["proj", n, i] => {
            let n = parse_num(n)?;
            let i = parse_num(i)?;
            if i == 0 || i > n {
                return Err(CliError::Input(format!(
                    "projection coordinate {i} out of 1..={n}"
                )));
            }
            Operation::projection(domain, n, i - 1)
        }
        _ => {
            return Err(CliError::Input(format!(
                "unknown operation spec `{spec}` (try dd, switching, missing, wildcard-majority, proj:N:I, near-proj:K, th:P:N)"
            )))
        }
    };
    Ok(op?)
}

fn witness_json(witness: &PreservationWitness) -> serde_json::Value {
    serde_json::json!({
        "rows": witness.rows,
        "violating": witness.violating,
    })
}

fn cmd_check_poly(file: &Path, op: Option<String>, op_file: Option<PathBuf>) -> CliResult<ExitCode> {
    let lang = io::language_from_str(&read_file(file)?)?;
    let operation = match (op, op_file) {
        (Some(spec), None) => parse_op_spec(&spec, lang.domain())?,
        (None, Some(path)) => io::operation_from_str(&read_file(&path)?)?,
        _ => {
            return Err(CliError::Input(
                "provide exactly one of --op or --op-file".to_string(),
            ))
        }
    };
    match preserves_language(&operation, &lang)? {
        LanguagePreservation::Preserved => {
            eprintln!("preserved: the operation is a polymorphism of every relation");
            println!("{}", serde_json::json!({"preserved": true}));
        }
        LanguagePreservation::Violated { relation, witness } => {
            eprintln!(
                "violated on `{relation}`: rows {:?} map to {:?}, which is outside the relation",
                witness.rows, witness.violating
            );
            println!(
                "{}",
                serde_json::json!({
                    "preserved": false,
                    "relation": relation,
                    "witness": witness_json(&witness),
                })
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_classify_binary(file: &Path, rel: Option<String>) -> CliResult<ExitCode> {
    let text = read_file(file)?;
    let lang = io::language_from_str(&text)?;
    let relation: Relation = match &rel {
        Some(name) => lang
            .get(name)
            .cloned()
            .ok_or_else(|| CliError::Input(format!("no relation named `{name}` in the file")))?,
        None => {
            let mut iter = lang.iter();
            let first = iter
                .next()
                .ok_or_else(|| CliError::Input("file contains no relations".to_string()))?;
            if iter.next().is_some() {
                return Err(CliError::Input(
                    "file contains several relations; pick one with --rel".to_string(),
                ));
            }
            first.1.clone()
        }
    };
    let class = classify_01all(&relation)?;
    let json = match &class {
        BinaryClass::Product { left, right } => serde_json::json!({
            "class": "product",
            "left": left.iter().collect::<Vec<_>>(),
            "right": right.iter().collect::<Vec<_>>(),
        }),
        BinaryClass::TwoFan {
            apex_left,
            left,
            apex_right,
            right,
        } => serde_json::json!({
            "class": "two-fan",
            "apex_left": apex_left,
            "left": left.iter().collect::<Vec<_>>(),
            "apex_right": apex_right,
            "right": right.iter().collect::<Vec<_>>(),
        }),
        BinaryClass::Bijection { map } => serde_json::json!({
            "class": "bijection",
            "map": map.iter().map(|(a, b)| vec![*a, *b]).collect::<Vec<_>>(),
        }),
        BinaryClass::NotPreserved(witness) => serde_json::json!({
            "class": "not-preserved",
            "witness": witness_json(witness),
        }),
    };
    eprintln!(
        "{}",
        match &class {
            BinaryClass::Product { .. } => "product of two label sets",
            BinaryClass::TwoFan { .. } => "two-fan (a full row joined with a full column)",
            BinaryClass::Bijection { .. } => "graph of a partial bijection",
            BinaryClass::NotPreserved(_) => "not preserved by the dual discriminator",
        }
    );
    println!("{json}");
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    trials: usize,
    seed: u64,
    domain: usize,
    vars: usize,
    density: f64,
    cost_max: u64,
    output: Option<PathBuf>,
    budget: Option<u64>,
) -> CliResult<ExitCode> {
    let budget = budget_from(budget)?;
    let bound = BigRational::from_integer((domain as i64).into());
    let mut csv = String::from(
        "id,seed,vars,domain,status,greedy_cost,lp_cost,lp_value,opt,greedy_ratio,lp_ratio\n",
    );
    let mut ratios: Vec<(BigRational, BigRational)> = Vec::new();
    let mut unsat = 0usize;
    let mut skipped = 0usize;

    for trial in 0..trials {
        let trial_seed = seed.wrapping_add(trial as u64);
        let instance = gen_random_01all(trial_seed, domain, vars, density, cost_max)?;
        let prefix = format!("{trial},{trial_seed},{vars},{domain}");
        let bi = make_23_minimal(&binarize(&instance, true)?);
        if is_trivial(&bi) {
            csv.push_str(&format!("{prefix},unsat,,,,,,\n"));
            unsat += 1;
            continue;
        }
        let optimum = match solve_exact(&instance, budget) {
            Ok(ExactOutcome::Solved { optimum, .. }) => optimum,
            Ok(ExactOutcome::Unsat) => {
                return Err(CliError::Internal(
                    "nontrivial instance reported unsatisfiable by the oracle".to_string(),
                ))
            }
            Err(mccsp_core::Error::BudgetExceeded { .. }) => {
                csv.push_str(&format!("{prefix},skipped,,,,,,\n"));
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };

        let greedy = solve_greedy(&bi)?;
        let greedy_cost = instance_cost(&instance, &greedy.assignment)?;
        let rounding = solve_lp_rounding(&bi)?;
        let lp_cost = instance_cost(&instance, &rounding.assignment)?;

        let one = BigRational::from_integer(1.into());
        let (greedy_ratio, lp_ratio) = if optimum.is_zero() {
            (one.clone(), one)
        } else {
            (&greedy_cost / &optimum, &lp_cost / &optimum)
        };
        if greedy_ratio > bound || lp_ratio > bound {
            return Err(CliError::Internal(format!(
                "approximation guarantee violated on seed {trial_seed}"
            )));
        }
        csv.push_str(&format!(
            "{prefix},ok,{greedy_cost},{lp_cost},{},{optimum},{greedy_ratio},{lp_ratio}\n",
            rounding.lp_value
        ));
        ratios.push((greedy_ratio, lp_ratio));
    }

    if !ratios.is_empty() {
        let count = BigRational::from_integer((ratios.len() as i64).into());
        let (sum_g, sum_l) = ratios.iter().fold(
            (BigRational::zero(), BigRational::zero()),
            |(g, l), (rg, rl)| (g + rg, l + rl),
        );
        let max_g = ratios.iter().map(|(g, _)| g).max().expect("nonempty");
        let max_l = ratios.iter().map(|(_, l)| l).max().expect("nonempty");
        eprintln!(
            "bench: {} solved, {unsat} unsat, {skipped} skipped; greedy ratio max {max_g} mean {}; lp ratio max {max_l} mean {}",
            ratios.len(),
            sum_g / &count,
            sum_l / &count,
        );
    } else {
        eprintln!("bench: 0 solved, {unsat} unsat, {skipped} skipped");
    }
    match output {
        Some(path) => fs::write(&path, csv)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}
