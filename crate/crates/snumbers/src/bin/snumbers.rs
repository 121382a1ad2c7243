//! Thin command-line front end over the library drivers.
//!
//! Exit codes: 0 success, 1 bad input, 2 internal consistency failure or a
//! failed axiom/verification.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use snumbers::cli::{
    parse_kinds, parse_n_range, resolve_output_path, run_axioms, run_compute, run_convergence,
    run_verify, OperatorSpec, OutputFormat, RunConfig,
};
use snumbers::engines::{SNumberKind, SearchBudget};
use snumbers::error::Error;
use snumbers::ScalarMode;

#[derive(Parser)]
#[command(
    name = "snumbers",
    about = "Certified two-sided bounds on strict s-numbers of l1->linf matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BudgetArgs {
    /// Random candidates per subspace search
    #[arg(long, default_value_t = 16)]
    candidates: usize,
    /// Local refinement rounds (halving step)
    #[arg(long, default_value_t = 12)]
    refine: usize,
    /// Seed for all randomized searches
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (results are independent of this)
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget {
            candidates: self.candidates,
            refine_rounds: self.refine,
            seed: self.seed,
            workers: self.workers.max(1),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Certified intervals for the requested s-numbers of one operator
    Compute {
        /// Operator spec: summation:N or volterra:N:right|mid
        #[arg(long, conflicts_with = "matrix")]
        operator: Option<String>,
        /// Read the operator from a matrix file instead
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Index or inclusive range, e.g. 2 or 1..3
        #[arg(long, default_value = "1..3")]
        n: String,
        /// Kinds by letter (a, c, d, b, m, i), e.g. bmi or all
        #[arg(long, default_value = "all")]
        kinds: String,
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long, default_value = "csv")]
        format: String,
        /// Write here instead of standard output (resolved against
        /// SNUMBERS_OUT_DIR when relative)
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also export the report's re-verifiable witnesses to this file
        #[arg(long)]
        witness_out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// One kind across a list of truncation sizes
    Convergence {
        /// Kind letter: a, c, d, b, m or i
        #[arg(long)]
        kind: char,
        #[arg(long)]
        n: usize,
        /// Comma-separated sizes, e.g. 2,4,8,16
        #[arg(long)]
        dims: String,
        /// Operator family: summation or volterra:right|mid
        #[arg(long, default_value = "summation")]
        family: String,
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Re-verify every witness in a file against an operator
    Verify {
        #[arg(long)]
        witnesses: PathBuf,
        #[arg(long)]
        operator: String,
        #[arg(long, default_value = "exact")]
        mode: String,
    },
    /// Interval-level axiom suite on random matrices
    Axioms {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Comma-separated matrix sizes
        #[arg(long, default_value = "3,4")]
        sizes: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

fn parse_mode(s: &str) -> Result<ScalarMode, Error> {
    match s {
        "exact" => Ok(ScalarMode::Exact),
        "float" => Ok(ScalarMode::Float),
        other => Err(Error::Parse(format!("unknown mode `{other}`"))),
    }
}

fn parse_dims(s: &str) -> Result<Vec<usize>, Error> {
    let dims: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::Parse(format!("bad size list `{s}`")))?;
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Parse(format!("bad size list `{s}`")));
    }
    Ok(dims)
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), Error> {
    match output {
        Some(path) => {
            let path = resolve_output_path(path);
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Error::Inconsistency(msg)) => {
            eprintln!("internal consistency failure: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Compute {
            operator,
            matrix,
            n,
            kinds,
            mode,
            format,
            output,
            witness_out,
            budget,
        } => {
            let spec = match (operator, matrix) {
                (Some(text), None) => OperatorSpec::parse(&text)?,
                (None, Some(path)) => OperatorSpec::MatrixFile { path },
                _ => {
                    return Err(Error::Parse(
                        "exactly one of --operator and --matrix is required".into(),
                    ))
                }
            };
            let (n_min, n_max) = parse_n_range(&n)?;
            let config = RunConfig {
                operator: spec,
                kinds: parse_kinds(&kinds)?,
                n_min,
                n_max,
                mode: parse_mode(&mode)?,
                budget: budget.budget(),
                format: OutputFormat::parse(&format)?,
            };
            let out = run_compute(&config)?;
            let text = match config.format {
                OutputFormat::Csv => out.csv.clone(),
                OutputFormat::Json => format!("{:#}\n", out.json),
            };
            emit(&text, output.as_ref())?;
            if let Some(wpath) = witness_out {
                let records = export_records(&config)?;
                let mut buf = Vec::new();
                snumbers::witnesses::write_witness_file(&mut buf, &records)?;
                std::fs::write(resolve_output_path(&wpath), buf)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Convergence {
            kind,
            n,
            dims,
            family,
            mode,
            format,
            output,
            budget,
        } => {
            let kind = SNumberKind::from_letter(kind)
                .ok_or_else(|| Error::Parse(format!("unknown kind letter `{kind}`")))?;
            let family = if family.starts_with("volterra") {
                let scheme = family.split(':').nth(1).unwrap_or("right").to_string();
                OperatorSpec::Volterra { cells: 1, scheme }
            } else if family == "summation" {
                OperatorSpec::Summation { n: 1 }
            } else {
                return Err(Error::Parse(format!("unknown family `{family}`")));
            };
            let out = run_convergence(
                kind,
                n,
                &parse_dims(&dims)?,
                &family,
                parse_mode(&mode)?,
                &budget.budget(),
            )?;
            let text = match OutputFormat::parse(&format)? {
                OutputFormat::Csv => out.csv.clone(),
                OutputFormat::Json => format!("{:#}\n", out.json),
            };
            emit(&text, output.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            witnesses,
            operator,
            mode,
        } => {
            let spec = OperatorSpec::parse(&operator)?;
            let outcomes = run_verify(&witnesses, &spec, parse_mode(&mode)?)?;
            let mut all_ok = true;
            for o in &outcomes {
                println!(
                    "record {}: {} ({})",
                    o.record,
                    if o.ok { "ok" } else { "FAIL" },
                    o.detail
                );
                all_ok &= o.ok;
            }
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Axioms {
            trials,
            sizes,
            budget,
        } => {
            let sizes = parse_dims(&sizes)?;
            let runs = run_axioms(trials, &sizes, budget.seed, &budget.budget())?;
            let mut any_fail = false;
            for run in &runs {
                let r = &run.report;
                println!(
                    "{}: PASS {}  INDETERMINATE {} ({:.1}%)  FAIL {}  unsupported {}",
                    run.axiom.tag(),
                    r.pass,
                    r.indeterminate,
                    100.0 * r.indeterminate_rate(),
                    r.fail,
                    r.unsupported
                );
                for f in r.failures.iter().take(5) {
                    println!("  failure: {f}");
                }
                any_fail |= r.fail > 0;
            }
            Ok(if any_fail {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

/// The re-verifiable records for a compute run: the paper factorization
/// pair, the constant-half approximant and both pigeonhole transcripts,
/// whenever they apply to the operator.
fn export_records(
    config: &RunConfig,
) -> Result<Vec<snumbers::witnesses::WitnessFileRecord>, Error> {
    use snumbers::witnesses::{
        build_factorization_discrete, build_factorization_volterra, pigeonhole_lower_gelfand,
        pigeonhole_lower_kolmogorov, rank_one_approximant, verify_factorization,
        WitnessFileRecord,
    };
    let op = config.operator.build(config.mode)?;
    let mode = config.mode;
    let mut records = Vec::new();
    for n in config.n_min..=config.n_max {
        for witness in [
            build_factorization_discrete(mode, n, op.domain.dim),
            build_factorization_volterra(mode, n, op.domain.dim),
        ]
        .into_iter()
        .flatten()
        {
            if verify_factorization(&witness, &op).map_or(false, |v| v.ok) {
                records.push(WitnessFileRecord::Factorization(witness));
                break;
            }
        }
        if let Ok((_, tr)) = pigeonhole_lower_gelfand(&op, n, None) {
            records.push(WitnessFileRecord::Pigeonhole(tr));
        }
        if let Ok((_, tr)) = pigeonhole_lower_kolmogorov(&op, n, None) {
            records.push(WitnessFileRecord::Pigeonhole(tr));
        }
    }
    if let Ok(w) = rank_one_approximant(&op) {
        records.push(WitnessFileRecord::Approximant(w));
    }
    Ok(records)
}
