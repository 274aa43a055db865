//! `fracvar`: fractional operators, Herglotz residuals, the reduced solver and
//! Noether checks from the command line.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracvar_core::Error;

mod commands;
mod input;

use input::{FnSpec, GridArg, Operator, TrajArg};

#[derive(Parser, Debug)]
#[command(name = "fracvar", version, about = "Fractional Herglotz variational problems on uniform grids")]
struct Cli {
    /// Node count, or A:B:N to also pin the interval.
    #[arg(long, global = true, value_name = "N | A:B:N")]
    grid: Option<GridArg>,

    /// Directory for CSV and JSON output files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    format: Format,

    /// TOML problem definition, used instead of --problem.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply a fractional operator to a closed-form function.
    Ops(OpsArgs),
    /// Euler-Lagrange residual of a trajectory.
    Residual(ResidualArgs),
    /// Solve the truncated-expansion problem by shooting.
    Solve(SolveArgs),
    /// Invariance, Noether residual and conserved quantity.
    Noether(NoetherArgs),
    /// Print the builtin problems.
    ListProblems,
}

#[derive(Args, Debug)]
struct OpsArgs {
    /// pow:P, rpow:P, const:C or line:M:C.
    #[arg(long = "fn", value_name = "SPEC")]
    function: FnSpec,
    #[arg(long, value_enum)]
    op: Operator,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
}

#[derive(Args, Debug, Clone)]
struct ProblemArgs {
    /// Builtin problem name (see list-problems).
    #[arg(long)]
    problem: Option<String>,
    /// Friction coefficient of noether_gamma.
    #[arg(long)]
    gamma: Option<f64>,
    /// Exponent p of noether_gamma.
    #[arg(long = "f-exponent")]
    f_exponent: Option<f64>,
    /// Overrides the order of a builtin problem.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args, Debug)]
struct ResidualArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Closed-form spec or CSV file, once per component.
    #[arg(long, required = true, num_args = 1.., value_name = "SPEC | PATH")]
    traj: Vec<TrajArg>,
    #[arg(long, default_value_t = 5e-2)]
    tol: f64,
    /// Release every right endpoint.
    #[arg(long)]
    free_right: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Closed-form reference for the comparison table.
    #[arg(long, value_name = "SPEC")]
    exact: Option<FnSpec>,
}

#[derive(Args, Debug)]
struct NoetherArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Generator per component: const:C or an expression in t and x<k>.
    #[arg(long, required = true, num_args = 1.., value_name = "GEN")]
    xi: Vec<String>,
    /// Use the extremal from the cyclic solver.
    #[arg(long, conflicts_with = "traj")]
    from_solve: bool,
    #[arg(long, num_args = 1.., value_name = "SPEC | PATH", required_unless_present = "from_solve")]
    traj: Vec<TrajArg>,
    /// Bound on the relative flatness of the conserved quantity.
    #[arg(long, default_value_t = 5e-2)]
    tol: f64,
}

/// Why a run stopped early.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit status 2.
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_status(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(e) => match e {
                Error::SymmetryViolation { .. }
                | Error::NoBracket { .. }
                | Error::NoConvergence { .. }
                | Error::Stiff { .. }
                | Error::Degenerate { .. }
                | Error::Eval(_)
                | Error::GammaPole(_) => 1,
                _ => 2,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

/// Result of one subcommand, before it is written out.
pub struct Report {
    /// Stem of the JSON file.
    pub name: &'static str,
    pub summary: serde_json::Value,
    /// `(file name, contents)`; the first table goes to stdout under `--format csv`.
    pub tables: Vec<(String, String)>,
    pub passed: bool,
}

fn emit(report: &Report, cli: &Cli) -> Result<(), Failure> {
    let json = serde_json::to_string_pretty(&report.summary).expect("summary is plain JSON") + "\n";
    let io = |what: &str, e: std::io::Error| Failure::Usage(format!("cannot write {what}: {e}"));
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| io(&dir.display().to_string(), e))?;
            if cli.format != Format::Json {
                for (file, body) in &report.tables {
                    let path = dir.join(file);
                    fs::write(&path, body).map_err(|e| io(&path.display().to_string(), e))?;
                }
            }
            if cli.format != Format::Csv {
                let path = dir.join(format!("{}.json", report.name));
                fs::write(&path, &json).map_err(|e| io(&path.display().to_string(), e))?;
            }
            print!("{json}");
        }
        None if cli.format == Format::Csv => {
            if let Some((_, body)) = report.tables.first() {
                print!("{body}");
            }
        }
        None => print!("{json}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let report = match &cli.command {
        Command::ListProblems => {
            for (name, about) in fracvar_core::expr::BUILTIN_PROBLEMS {
                println!("{name:<14} {about}");
            }
            return Ok(true);
        }
        Command::Ops(a) => commands::ops(cli.grid, &a.function, a.op, a.alpha)?,
        Command::Residual(a) => {
            let spec = commands::load_problem(&a.problem, cli.config.as_deref())?.0;
            commands::residual(spec, cli.grid, &a.traj, a.tol, a.free_right)?
        }
        Command::Solve(a) => {
            let (spec, settings) = commands::load_problem(&a.problem, cli.config.as_deref())?;
            commands::solve(spec, settings, cli.grid, a.exact.as_ref())?
        }
        Command::Noether(a) => {
            let (spec, settings) = commands::load_problem(&a.problem, cli.config.as_deref())?;
            let source = if a.from_solve { None } else { Some(a.traj.as_slice()) };
            commands::noether(spec, settings, cli.grid, &a.xi, source, a.tol)?
        }
    };
    emit(&report, cli)?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_status())
        }
    }
}
