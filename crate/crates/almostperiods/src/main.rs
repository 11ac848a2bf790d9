use std::io::{Read, Write};
use std::process::ExitCode;

use almostperiods::jobs::{self, Context, KoszulArgs, LinalgVerb, Outcome, PeriodVerb};
use almostperiods::json::{bad, params_from_json};
use almostperiods_core::Result;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Exact elementary divisors, Witt-vector periods and Koszul cohomology.
///
/// Reports are JSON. Exit status: 0 on success, 1 when a mathematical
/// check fails (the report names the invariant), 2 on bad input or
/// exhausted precision.
#[derive(Parser, Debug)]
#[command(name = "almostperiods", version)]
struct Cli {
    /// Input JSON document, `-` for stdin.
    #[arg(long, global = true, value_name = "FILE|-")]
    input: Option<String>,
    /// Report destination, `-` for stdout (default).
    #[arg(long, global = true, value_name = "FILE|-")]
    output: Option<String>,
    /// Seed for randomized suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Model parameters `{"p","s","L","N","m","d"}`; overrides the input's `params`.
    #[arg(long, global = true, value_name = "JSON")]
    params: Option<String>,
    /// Table cell budget.
    #[arg(long, global = true, env = "ALMOSTPERIODS_MAX_CELLS")]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Elementary-divisor sequence operations.
    Eldiv,
    /// Smith normal form and cokernel divisors of a matrix.
    Snf,
    /// Exactness, approximate equality, homology and duals of torsion modules.
    Module,
    /// The Frobenius tower verifier.
    Tower,
    /// Witt-vector period computations.
    Periods {
        #[arg(value_enum)]
        verb: Periods,
    },
    /// Howell form, kernels and cohomology over Z/p^m.
    Linalg {
        #[arg(value_enum)]
        verb: Linalg,
    },
    /// Koszul cohomology table over all lines.
    Koszul {
        #[arg(long)]
        n: usize,
        #[arg(long = "L")]
        level: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        p: u32,
        /// Degrees, e.g. `0..2` or `1`.
        #[arg(long, value_name = "LO..HI")]
        q_range: Option<String>,
    },
    /// Solve x^p - x = a for v(a) > 0.
    AsSolve,
    /// Run the seeded property suites.
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Periods {
    Xi,
    Divxi,
    LogEps,
    BdrEq,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Linalg {
    Howell,
    Kernel,
    Cohomology,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Eldiv => "eldiv",
            Command::Snf => "snf",
            Command::Module => "module",
            Command::Tower => "tower",
            Command::Periods { .. } => "periods",
            Command::Linalg { .. } => "linalg",
            Command::Koszul { .. } => "koszul",
            Command::AsSolve => "as-solve",
            Command::Check { .. } => "check",
        }
    }
}

fn read_input(path: Option<&str>) -> Result<Value> {
    let text = match path {
        None => return Ok(json!({})),
        Some("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| bad(&format!("stdin: {e}")))?;
            s
        }
        Some(p) => std::fs::read_to_string(p).map_err(|e| bad(&format!("{p}: {e}")))?,
    };
    serde_json::from_str(&text).map_err(|e| bad(&format!("invalid JSON: {e}")))
}

fn context(cli: &Cli, input: &Value) -> Result<Context> {
    let params = match (&cli.params, input.get("params")) {
        (Some(s), _) => Some(params_from_json(&serde_json::from_str(s).map_err(|e| bad(&format!("--params: {e}")))?)?),
        (None, Some(v)) => Some(params_from_json(v)?),
        (None, None) => None,
    };
    let seed = cli.seed.or_else(|| input.get("seed").and_then(Value::as_u64));
    Ok(Context { params, seed, budget: cli.budget })
}

fn run(cli: &Cli) -> Result<Outcome> {
    let input = read_input(cli.input.as_deref())?;
    jobs::check_schema(&input)?;
    let ctx = context(cli, &input)?;
    match &cli.command {
        Command::Eldiv => jobs::eldiv(&input, &ctx),
        Command::Snf => jobs::snf(&input, &ctx),
        Command::Module => jobs::module(&input, &ctx),
        Command::Tower => jobs::tower(&input, &ctx),
        Command::Periods { verb } => {
            let v = match verb {
                Periods::Xi => PeriodVerb::Xi,
                Periods::Divxi => PeriodVerb::DivXi,
                Periods::LogEps => PeriodVerb::LogEps,
                Periods::BdrEq => PeriodVerb::BdrEq,
            };
            jobs::periods(v, &input, &ctx)
        }
        Command::Linalg { verb } => {
            let v = match verb {
                Linalg::Howell => LinalgVerb::Howell,
                Linalg::Kernel => LinalgVerb::Kernel,
                Linalg::Cohomology => LinalgVerb::Cohomology,
            };
            jobs::linalg(v, &input, &ctx)
        }
        Command::Koszul { n, level, m, p, q_range } => {
            let degrees = q_range.as_deref().map(jobs::parse_q_range).transpose()?;
            jobs::koszul(KoszulArgs { n: *n, level: *level, m: *m, p: *p, degrees }, &ctx)
        }
        Command::AsSolve => jobs::as_solve(&input, &ctx),
        Command::Check { suite } => jobs::check(suite, &ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = jobs::report(cli.command.name(), run(&cli));
    if let Some(err) = report.get("error") {
        eprintln!("almostperiods: {}", err["message"].as_str().unwrap_or("error"));
    } else if let Some(f) = report.get("failed_invariant") {
        eprintln!("almostperiods: check failed: {}", f.as_str().unwrap_or(""));
    }
    let mut text = serde_json::to_string_pretty(&report).expect("serializable");
    text.push('\n');
    let written = match cli.output.as_deref() {
        None | Some("-") => std::io::stdout().write_all(text.as_bytes()),
        Some(path) => std::fs::write(path, text),
    };
    if let Err(e) = written {
        eprintln!("almostperiods: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
