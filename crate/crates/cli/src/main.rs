//! `isokit`: JSON-in, JSON-out front end.
//!
//! Exit codes: 0 success, 2 input or configuration error, 3 a proven bound
//! was violated (a numerical fault, never a user error).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use isokit::admissible::peculiar_sweep;
use isokit::bounds::grid_verify_all;
use isokit::certifier::{certify_with, Sampling};
use isokit::geom::{convex_hull, PolytopeDoc};
use isokit::john::normalize;
use isokit::lattice::verify_width_volume_corollary;
use isokit::Coord;
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Result of a command: the JSON to print and whether a bound was violated.
struct Outcome {
    body: Value,
    violated: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Rational,
    Float,
}

#[derive(Parser, Debug)]
#[command(name = "isokit", version, about = "Reverse isodiametric normalization and certification")]
struct Cli {
    /// Solver and contact tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Optimizer restarts per weight vector.
    #[arg(long, global = true, default_value_t = 64)]
    restarts: usize,
    /// Simplex grid step for lemma verification, in (0, 0.25].
    #[arg(long, global = true, default_value_t = 0.05)]
    grid_step: f64,
    /// Arithmetic for lattice computations.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Rational)]
    mode: ModeArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalize a polytope and report its isodiametric quotient.
    Normalize { file: PathBuf },
    /// Lattice width and the volume bound ω³/12.
    Width { file: PathBuf },
    /// Check the four weight inequalities on a simplex grid.
    VerifyLemmas,
    /// Maximize the objective over admissible sets for random weights.
    Certify {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Sample weights with λ1 = 0 (ceiling 9/5).
        #[arg(long)]
        zero_first: bool,
    },
    /// Sweep peculiar sets against random weights.
    Peculiar {
        #[arg(long, default_value_t = 10_000)]
        pairs: usize,
        #[arg(long, default_value_t = 1000)]
        lambdas: usize,
    },
}

fn validate(cli: &Cli) -> Result<(), CliError> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(CliError::Config(format!("--tol must be positive, got {}", cli.tol)));
    }
    if !(cli.grid_step > 0.0 && cli.grid_step <= 0.25) {
        return Err(CliError::Config(format!("--grid-step must lie in (0, 0.25], got {}", cli.grid_step)));
    }
    Ok(())
}

fn read_doc(path: &Path) -> Result<PolytopeDoc, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    PolytopeDoc::parse(&text).map_err(CliError::input)
}

fn cmd_normalize(cli: &Cli, file: &Path) -> Result<Outcome, CliError> {
    let pts = read_doc(file)?.float_points().map_err(CliError::input)?;
    let p = convex_hull(&pts).map_err(CliError::input)?;
    let r = normalize(&p, cli.tol).map_err(CliError::input)?;
    let floor = std::f64::consts::SQRT_2 / 12.0 - 10.0 * cli.tol;
    Ok(Outcome { violated: r.idq < floor, body: serde_json::to_value(r.to_doc()).expect("serializable") })
}

fn width_report<S: Coord>(pts: Vec<[S; 3]>) -> Result<Outcome, CliError> {
    let p = convex_hull(&pts).map_err(CliError::input)?;
    let r = verify_width_volume_corollary(&p).map_err(CliError::input)?;
    Ok(Outcome { violated: !r.satisfied, body: r.to_json() })
}

fn cmd_width(cli: &Cli, file: &Path) -> Result<Outcome, CliError> {
    let doc = read_doc(file)?;
    match cli.mode {
        ModeArg::Rational => width_report(doc.rational_points().map_err(CliError::input)?),
        ModeArg::Float => width_report(doc.float_points().map_err(CliError::input)?),
    }
}

fn cmd_verify_lemmas(cli: &Cli) -> Result<Outcome, CliError> {
    let r = grid_verify_all(cli.grid_step).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Outcome { violated: r.violation_count > 0, body: serde_json::to_value(&r).expect("serializable") })
}

fn cmd_certify(cli: &Cli, samples: usize, zero_first: bool) -> Result<Outcome, CliError> {
    let sampling = if zero_first { Sampling::ZeroFirst } else { Sampling::Simplex };
    let s = certify_with(samples, cli.seed, cli.restarts, cli.tol, sampling);
    let violated = s.global_max > s.ceiling + cli.tol || !s.violations.is_empty();
    Ok(Outcome { violated, body: serde_json::to_value(&s).expect("serializable") })
}

fn cmd_peculiar(cli: &Cli, pairs: usize, lambdas: usize) -> Result<Outcome, CliError> {
    let r = peculiar_sweep(pairs, lambdas, cli.seed);
    let violated = r.relation_failures > 0 || r.max_objective > 2.0 + 1e-9 || r.max_f_combined > 2.0 + 1e-9;
    Ok(Outcome { violated, body: serde_json::to_value(&r).expect("serializable") })
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    validate(cli)?;
    match &cli.command {
        Command::Normalize { file } => cmd_normalize(cli, file),
        Command::Width { file } => cmd_width(cli, file),
        Command::VerifyLemmas => cmd_verify_lemmas(cli),
        Command::Certify { samples, zero_first } => cmd_certify(cli, *samples, *zero_first),
        Command::Peculiar { pairs, lambdas } => cmd_peculiar(cli, *pairs, *lambdas),
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("ISOKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(&cli) {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.body).expect("serializable"));
            if out.violated {
                eprintln!("error: bound violated");
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let kind = match e {
                CliError::Input(_) => "input",
                CliError::Config(_) => "config",
            };
            println!("{}", json!({ "error": kind, "message": e.to_string() }));
            ExitCode::from(2)
        }
    }
}
