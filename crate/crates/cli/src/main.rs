//! `sonclyap`: certify nonnegativity of polynomials and Lyapunov stability
//! of polynomial ODEs with SONC and DSONC certificates.
//!
//! Exit codes: 0 certified, 1 not certified, 2 unknown or solver failure,
//! 64 usage or parse error, 65 invalid data, 66 unreadable input,
//! 74 unwritable output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod input;
mod report;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use sonclyap_core::conic::SolverSettings;
use sonclyap_core::lyapunov::{Template, EPSILON_MIN};
use sonclyap_core::{CertificateKind, Error as CoreError, Mode, Objective};

use commands::{LyapunovArgs, PolyInput, SimulateArgs, SupportArgs};
use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Write(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Data(_) => 65,
            CliError::Io(_) => 66,
            CliError::Write(_) => 74,
            CliError::Core(e) => match e {
                CoreError::Syntax { .. }
                | CoreError::UnknownVariable { .. }
                | CoreError::InvalidExponent { .. }
                | CoreError::InvalidArgument(_) => 64,
                CoreError::SolverUnknown(_) => 2,
                CoreError::NonFinite { .. } => 1,
                _ => 65,
            },
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "sonclyap", version, about = "SONC/DSONC certificates for polynomial nonnegativity and Lyapunov stability")]
struct Cli {
    /// Write every conic program solved to this directory, one file per solve.
    #[arg(long, global = true, value_name = "DIR")]
    dump_program: Option<PathBuf>,
    /// Worker threads when several input files are given.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify that a polynomial is nonnegative.
    Check {
        #[command(flatten)]
        poly: PolyArgs,
        /// sonc, dsonc or circuit.
        #[arg(long, default_value = "sonc", value_parser = parse_kind)]
        certificate: CertificateKind,
        /// Solver feasibility tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// JSON report file.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Seed for the counterexample search.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Analyze a circuit polynomial: structure, circuit number, nonnegativity.
    Circuit {
        #[command(flatten)]
        poly: PolyArgs,
        /// JSON report file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Verify a candidate Lyapunov function.
    Verify {
        /// System files (JSON).
        #[arg(required = true)]
        systems: Vec<PathBuf>,
        /// Candidate expression; overrides the file's candidate.
        #[arg(long)]
        candidate: Option<String>,
        #[command(flatten)]
        opts: LyapunovOpts,
    },
    /// Search for a Lyapunov function on a support template.
    Search {
        /// System files (JSON).
        #[arg(required = true)]
        systems: Vec<PathBuf>,
        /// Maximal degree of V (even).
        #[arg(long)]
        degree: Option<u32>,
        /// diagonal, full-even or diagonal-plus; defaults to diagonal, or
        /// diagonal-plus when --extras is given.
        #[arg(long, value_parser = parse_template)]
        template: Option<Template>,
        /// Extra monomials for V, e.g. "x2^4,x5^4".
        #[arg(long)]
        extras: Option<String>,
        /// min-coefficient-sum or feasibility.
        #[arg(long, default_value = "min-coefficient-sum", value_parser = parse_objective)]
        objective: Objective,
        #[command(flatten)]
        opts: LyapunovOpts,
    },
    /// Integrate the system with RK4 and print CSV rows t, x..., [V].
    Simulate {
        /// System file (JSON).
        system: PathBuf,
        /// Initial state, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// CSV output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Evaluate this V along the trajectory.
        #[arg(long)]
        candidate: Option<String>,
        /// Evaluate the V stored in a verify/search report.
        #[arg(long, value_name = "REPORT")]
        lyapunov: Option<PathBuf>,
        /// Keep every k-th step (the final state is always kept).
        #[arg(long, default_value_t = 1)]
        every: usize,
    },
    /// Re-check a report's witnesses without the solver.
    Replay {
        /// Report written by `check`, `verify` or `search`.
        report: PathBuf,
    },
}

#[derive(Args, Debug)]
struct PolyArgs {
    /// Polynomial expression, e.g. "x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2".
    #[arg(required_unless_present = "file", conflicts_with = "file", allow_hyphen_values = true)]
    expr: Option<String>,
    /// Read the expression from a file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Comma-separated variable order; inferred from the expression otherwise.
    #[arg(long)]
    vars: Option<String>,
}

impl From<PolyArgs> for PolyInput {
    fn from(a: PolyArgs) -> Self {
        PolyInput {
            expr: a.expr,
            file: a.file,
            vars: a.vars,
        }
    }
}

#[derive(Args, Debug)]
struct LyapunovOpts {
    /// sonc or dsonc.
    #[arg(long, default_value = "sonc", value_parser = parse_kind)]
    certificate: CertificateKind,
    /// stable (dV/dt <= 0) or asymptotic (dV/dt < 0 away from the origin).
    #[arg(long, default_value = "asymptotic", value_parser = parse_mode)]
    mode: Mode,
    /// Make even coefficients off the reduced Newton-polytope vertices nonpositive.
    #[arg(long)]
    interior_negative: bool,
    /// Lower bound on the strictness margins of V and -dV/dt.
    #[arg(long, default_value_t = EPSILON_MIN)]
    epsilon_min: f64,
    /// Solver feasibility tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Report file; a directory when several systems are given.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Seed for sampling V and its derivative.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_kind(s: &str) -> Result<CertificateKind, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

fn parse_template(s: &str) -> Result<Template, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    ExitCode::from(run(cli))
}

fn fail(e: &CliError) -> u8 {
    eprintln!("error: {e}");
    e.exit_code()
}

fn run(cli: Cli) -> u8 {
    let settings = SolverSettings {
        dump_dir: cli.dump_program.clone(),
        ..SolverSettings::default()
    };
    match cli.command {
        Command::Check {
            poly,
            certificate,
            tol,
            report,
            seed,
        } => {
            let settings = SolverSettings {
                feas_tol: tol,
                ..settings
            };
            single(commands::check(&poly.into(), certificate, &settings, seed), report.as_deref())
        }
        Command::Circuit { poly, report } => single(
            commands::check(&poly.into(), CertificateKind::Circuit, &settings, 0),
            report.as_deref(),
        ),
        Command::Verify {
            systems,
            candidate,
            opts,
        } => {
            let (args, report) = lyapunov_args(opts, Objective::MinCoefficientSum, settings);
            batch(&systems, report.as_deref(), cli.jobs, |path| {
                commands::verify(path, candidate.as_deref(), &args)
            })
        }
        Command::Search {
            systems,
            degree,
            template,
            extras,
            objective,
            opts,
        } => {
            let (args, report) = lyapunov_args(opts, objective, settings);
            let support = SupportArgs {
                degree,
                template,
                extras,
            };
            batch(&systems, report.as_deref(), cli.jobs, |path| {
                commands::search(path, &support, &args)
            })
        }
        Command::Simulate {
            system,
            x0,
            t_end,
            dt,
            out,
            candidate,
            lyapunov,
            every,
        } => {
            let args = SimulateArgs {
                x0,
                t_end,
                dt,
                candidate,
                lyapunov,
                every,
            };
            let traj = match commands::simulate_system(&system, &args) {
                Ok(t) => t,
                Err(e) => return fail(&e),
            };
            let written = match &out {
                Some(path) => std::fs::File::create(path)
                    .map_err(|e| CliError::Write(format!("{}: {e}", path.display())))
                    .and_then(|f| commands::write_csv(std::io::BufWriter::new(f), &traj)),
                None => commands::write_csv(std::io::stdout().lock(), &traj),
            };
            match written {
                Ok(()) => 0,
                Err(e) => fail(&e),
            }
        }
        Command::Replay { report } => match commands::replay(&report) {
            Ok(r) => {
                for note in &r.notes {
                    println!("  {note}");
                }
                if r.matches {
                    println!("replay: {} (matches the report)", r.replayed);
                    r.replayed.exit_code()
                } else {
                    println!("replay: {} (MISMATCH, report says {})", r.replayed, r.recorded);
                    1
                }
            }
            Err(e) => fail(&e),
        },
    }
}

fn lyapunov_args(opts: LyapunovOpts, objective: Objective, settings: SolverSettings) -> (LyapunovArgs, Option<PathBuf>) {
    (
        LyapunovArgs {
            kind: opts.certificate,
            mode: opts.mode,
            objective,
            interior_negative: opts.interior_negative,
            epsilon_min: opts.epsilon_min,
            tol: opts.tol,
            seed: opts.seed,
            settings,
        },
        opts.report,
    )
}

fn emit(report: &Report, path: Option<&Path>, label: Option<&Path>) -> u8 {
    let line = commands::summary(report);
    {
        let mut out = std::io::stdout().lock();
        let _ = match label {
            Some(l) => writeln!(out, "{}: {line}", l.display()),
            None => writeln!(out, "{line}"),
        };
    }
    if let Some(path) = path {
        if let Err(e) = report.write(path) {
            return fail(&e);
        }
    }
    report.status.exit_code()
}

fn single(result: Result<Report, CliError>, report: Option<&Path>) -> u8 {
    match result {
        Ok(r) => emit(&r, report, None),
        Err(e) => fail(&e),
    }
}

/// Runs `job` over every input, in parallel with `--jobs`; the exit code is
/// the largest one seen.
fn batch<F>(inputs: &[PathBuf], report: Option<&Path>, jobs: Option<usize>, job: F) -> u8
where
    F: Fn(&Path) -> Result<Report, CliError> + Sync,
{
    let many = inputs.len() > 1;
    let one = |path: &PathBuf| -> u8 {
        let target = report.map(|r| commands::report_path(r, path, many));
        match job(path) {
            Ok(r) => emit(&r, target.as_deref(), many.then_some(path.as_path())),
            Err(e) => {
                let msg = e.to_string();
                let name = path.display().to_string();
                if msg.starts_with(&name) {
                    eprintln!("error: {msg}");
                } else {
                    eprintln!("error: {name}: {msg}");
                }
                e.exit_code()
            }
        }
    };
    if !many {
        return one(&inputs[0]);
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(1)).build() {
        Ok(p) => p,
        Err(e) => return fail(&CliError::Usage(e.to_string())),
    };
    pool.install(|| inputs.par_iter().map(one).max().unwrap_or(0))
}
