//! Command-line front end: generate test problems, run the decomposition,
//! and check results against inputs and planted eigenvalues.
//!
//! Exit codes: 0 success, 1 validation failure, 2 numerical failure
//! (`sweep_limit` outcome or a check above its tolerance), 3 I/O failure.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use hyperkog::driver::{self, Config, HsvdResult, Outcome, RunStats};
use hyperkog::harness::{self, Field, TestSpec};
use hyperkog::io::{self, FileError, ParsedMatrix};
use hyperkog::matrix::{Matrix, SignDiagonal};
use hyperkog::scalar::{Scalar, C64};

const SIGMA_FILE: &str = "sigma.txt";
const U_FILE: &str = "u.jkog";
const V_INV_FILE: &str = "v_inv.jkog";
const STATS_FILE: &str = "stats.txt";

#[derive(Parser)]
#[command(
    name = "hyperkog",
    version,
    about = "Hyperbolic SVD of square matrices by two-sided plane transformations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a test problem with planted eigenvalues.
    Gen(GenArgs),
    /// Decompose a matrix file into U Σ V⁻¹.
    Run(RunArgs),
    /// Check a finished run against its input (and planted eigenvalues).
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FieldArg {
    R,
    C,
}

#[derive(Args)]
struct GenArgs {
    /// Problem order n₀ (at least 2).
    #[arg(long)]
    order: usize,
    /// Scalar field: r (real) or c (complex).
    #[arg(long)]
    field: FieldArg,
    /// Eigenvalue range: 1 = uniform (0,1], 2 = uniform [−1,1], 3 = normal.
    #[arg(long)]
    range: u8,
    /// Smallest admitted eigenvalue magnitude.
    #[arg(long, default_value_t = 1e-13)]
    eps: f64,
    /// PRNG seed; the same spec reproduces the same problem bitwise.
    #[arg(long)]
    seed: u64,
    /// Matrix file to write; planted eigenvalues go to the sibling
    /// `.lambda` file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Matrix file to decompose.
    #[arg(long)]
    input: PathBuf,
    /// Bound on |tanh ψ| in (0, 1]; lower it and rerun after a
    /// sweep_limit outcome.
    #[arg(long, default_value_t = 1.0)]
    upsilon: f64,
    /// Worker count (default: $HYPERKOG_TASKS, else 1).  Results are
    /// bitwise identical for every value.
    #[arg(long)]
    tasks: Option<usize>,
    /// Budget in virtual sweeps (n₀ − 1 multi-steps each).
    #[arg(long, default_value_t = 50)]
    max_sweeps: usize,
    /// Also accumulate and write U and V⁻¹.
    #[arg(long)]
    vectors: bool,
    /// Directory for sigma.txt, stats.txt and optional u.jkog/v_inv.jkog.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    /// The matrix file that was decomposed.
    #[arg(long)]
    input: PathBuf,
    /// Directory a `run --vectors` wrote its results to.
    #[arg(long)]
    result_dir: PathBuf,
    /// Planted eigenvalue file (enables the eigenvalue check).
    #[arg(long)]
    planted: Option<PathBuf>,
    /// Acceptance threshold for the decomposition residual.
    #[arg(long, default_value_t = 1e-12)]
    tol_decomp: f64,
    /// Acceptance threshold for the eigenvalue error.
    #[arg(long, default_value_t = 1e-11)]
    tol_eigen: f64,
}

enum CliError {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> CliError {
        match e {
            FileError::Io { .. } => CliError::Io(e.to_string()),
            FileError::Format { .. } => CliError::Validation(e.to_string()),
        }
    }
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    harness::assert_fp_environment();
    let outcome = match cli.cmd {
        Cmd::Gen(args) => cmd_gen(&args),
        Cmd::Run(args) => cmd_run(&args),
        Cmd::Check(args) => cmd_check(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn cmd_gen(args: &GenArgs) -> Result<i32, CliError> {
    if args.order < 2 {
        return Err(CliError::Validation(format!(
            "--order must be at least 2, got {}",
            args.order
        )));
    }
    if !(1..=3).contains(&args.range) {
        return Err(CliError::Validation(format!(
            "--range must be 1, 2 or 3, got {}",
            args.range
        )));
    }
    if !(args.eps > 0.0 && args.eps < 1.0) {
        return Err(CliError::Validation(format!(
            "--eps must lie in (0, 1), got {}",
            args.eps
        )));
    }
    let spec = TestSpec {
        order: args.order,
        field: match args.field {
            FieldArg::R => Field::Real,
            FieldArg::C => Field::Complex,
        },
        range: args.range,
        eps_floor: args.eps,
        seed: args.seed,
    };
    let lambda_path = args.out.with_extension("lambda");
    match spec.field {
        Field::Real => {
            let gen = harness::generate::<f64>(&spec);
            io::write_matrix(&args.out, &gen.g0, &gen.j0)?;
            io::write_values(&lambda_path, &gen.planted_eigenvalues)?;
        }
        Field::Complex => {
            let gen = harness::generate::<C64>(&spec);
            io::write_matrix(&args.out, &gen.g0, &gen.j0)?;
            io::write_values(&lambda_path, &gen.planted_eigenvalues)?;
        }
    }
    Ok(0)
}

fn cmd_run(args: &RunArgs) -> Result<i32, CliError> {
    if !(args.upsilon > 0.0 && args.upsilon <= 1.0) {
        return Err(CliError::Validation(format!(
            "--upsilon must lie in (0, 1], got {}",
            args.upsilon
        )));
    }
    if args.max_sweeps == 0 {
        return Err(CliError::Validation("--max-sweeps must be positive".into()));
    }
    let tasks = resolve_tasks(args.tasks)?;
    let cfg = Config {
        upsilon: args.upsilon,
        target_multistep_len: None,
        max_virtual_sweeps: args.max_sweeps,
        accumulate_vectors: args.vectors,
        tasks,
    };
    match io::read_matrix(&args.input)? {
        ParsedMatrix::Real { g, j } => run_field(&g, &j, &cfg, args),
        ParsedMatrix::Complex { g, j } => run_field(&g, &j, &cfg, args),
    }
}

fn run_field<S: Scalar>(
    g: &Matrix<S>,
    j: &SignDiagonal,
    cfg: &Config,
    args: &RunArgs,
) -> Result<i32, CliError> {
    let result = driver::run(g, j, cfg);
    std::fs::create_dir_all(&args.out_dir).map_err(|e| {
        CliError::Io(format!("{}: {e}", args.out_dir.display()))
    })?;
    io::write_values(&args.out_dir.join(SIGMA_FILE), &result.sigma)?;
    if let Some(u) = &result.u {
        write_factor(&args.out_dir.join(U_FILE), u, j)?;
    }
    if let Some(v_inv) = &result.v_inv {
        write_factor(&args.out_dir.join(V_INV_FILE), v_inv, j)?;
    }
    io::write_stats(&args.out_dir.join(STATS_FILE), &result.stats, cfg.upsilon)?;
    if result.stats.outcome.is_success() {
        Ok(0)
    } else {
        eprintln!(
            "run ended with outcome={}; try a smaller --upsilon or more --max-sweeps",
            result.stats.outcome.as_str()
        );
        Ok(2)
    }
}

/// Matrix files only hold finite entries; a factor poisoned by a failed
/// run is skipped (with a note) rather than written malformed.
fn write_factor<S: Scalar>(
    path: &Path,
    m: &Matrix<S>,
    j: &SignDiagonal,
) -> Result<(), CliError> {
    if m.is_finite() {
        io::write_matrix(path, m, j)?;
    } else {
        eprintln!(
            "skipping {}: factor has non-finite entries",
            path.display()
        );
    }
    Ok(())
}

fn cmd_check(args: &CheckArgs) -> Result<i32, CliError> {
    let input = io::read_matrix(&args.input)?;
    let sigma = io::read_values(&args.result_dir.join(SIGMA_FILE))?;
    let u = io::read_matrix(&args.result_dir.join(U_FILE))?;
    let v_inv = io::read_matrix(&args.result_dir.join(V_INV_FILE))?;
    let stats = io::read_stats(&args.result_dir.join(STATS_FILE))?;
    let planted = match &args.planted {
        Some(path) => Some(io::read_values(path)?),
        None => None,
    };

    match (input, u, v_inv) {
        (
            ParsedMatrix::Real { g, j },
            ParsedMatrix::Real { g: u, .. },
            ParsedMatrix::Real { g: v_inv, j: jv },
        ) => check_field(&g, &j, &jv, sigma, u, v_inv, &stats, planted, args),
        (
            ParsedMatrix::Complex { g, j },
            ParsedMatrix::Complex { g: u, .. },
            ParsedMatrix::Complex { g: v_inv, j: jv },
        ) => check_field(&g, &j, &jv, sigma, u, v_inv, &stats, planted, args),
        _ => Err(CliError::Validation(
            "field tags of the input and result files differ".into(),
        )),
    }
}

#[allow(clippy::too_many_arguments)]
fn check_field<S: Scalar>(
    g0: &Matrix<S>,
    j: &SignDiagonal,
    j_result: &SignDiagonal,
    sigma: Vec<f64>,
    u: Matrix<S>,
    v_inv: Matrix<S>,
    stats: &io::StatsFile,
    planted: Option<Vec<f64>>,
    args: &CheckArgs,
) -> Result<i32, CliError> {
    let n = g0.order();
    if sigma.len() != n || u.order() != n || v_inv.order() != n {
        return Err(CliError::Validation(format!(
            "dimension mismatch: input order {n}, sigma {}, U {}, V⁻¹ {}",
            sigma.len(),
            u.order(),
            v_inv.order()
        )));
    }
    if j_result != j {
        return Err(CliError::Validation(
            "sign diagonals of the input and result files differ".into(),
        ));
    }
    if let Some(lam) = &planted {
        if lam.len() != n {
            return Err(CliError::Validation(format!(
                "planted eigenvalue count {} does not match order {n}",
                lam.len()
            )));
        }
    }
    let outcome: Outcome = stats
        .outcome
        .parse()
        .map_err(CliError::Validation)?;
    let result = HsvdResult {
        sigma,
        u: Some(u),
        v_inv: Some(v_inv),
        j: j.clone(),
        stats: RunStats {
            steps: stats.steps,
            multisteps: stats.multisteps,
            cycles: stats.cycles,
            off_initial: stats.off_initial,
            off_final: stats.off_final,
            outcome,
        },
    };

    let err_decomp = harness::check_decomposition(g0, &result);
    println!("err_decomp={err_decomp:e}");
    let mut ok = err_decomp <= args.tol_decomp;
    if let Some(lam) = &planted {
        let err_eigen = harness::check_eigenvalues(lam, &result.sigma, j);
        println!("err_eigen={err_eigen:e}");
        ok = ok && err_eigen <= args.tol_eigen;
    }
    println!("cycles={:e}", stats.cycles);
    if ok {
        Ok(0)
    } else {
        Err(CliError::Numerical("checks exceeded tolerances".into()))
    }
}

fn resolve_tasks(flag: Option<usize>) -> Result<usize, CliError> {
    let tasks = match flag {
        Some(t) => t,
        None => match std::env::var("HYPERKOG_TASKS") {
            Ok(s) => s.trim().parse().map_err(|_| {
                CliError::Validation(format!(
                    "HYPERKOG_TASKS must be a positive integer, got {s:?}"
                ))
            })?,
            Err(std::env::VarError::NotPresent) => 1,
            Err(e) => return Err(CliError::Validation(format!("HYPERKOG_TASKS: {e}"))),
        },
    };
    if tasks == 0 {
        return Err(CliError::Validation("task count must be positive".into()));
    }
    Ok(tasks)
}
