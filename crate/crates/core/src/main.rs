use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aluthge_lab::aluthge::{aluthge_iterates, aluthge_transform, Lambda};
use aluthge_lab::shadowing::{
    generate_pseudo_orbit, hyperbolic_splitting, shadow_orbit, transfer_shadowing, transfer_shadowing_back,
    verify_shadowing,
};
use aluthge_lab::spectral::{
    is_quasi_hyperbolic_spectral, quasi_hyperbolic_definitional, spectrum_report, SearchBudget,
};
use aluthge_lab::suites::{run_suites, Suite};
use aluthge_lab::ComplexMatrix;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "aluthge-lab", version, about = "Numerical laboratory for lambda-Aluthge transforms")]
struct Cli {
    /// Zero wall times and omit timestamps so reruns are byte-identical.
    #[arg(long, global = true)]
    stable_output: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the lambda-Aluthge transform of a matrix.
    Transform {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate the transform, recording operator norms and normality defects.
    Iterate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Eigenvalues, spectral radius and distance to the unit circle.
    Spectrum {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Decide quasi-hyperbolicity.
    Quasihyp {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Spectral)]
        method: Method,
        #[arg(long, default_value_t = 20)]
        nmax: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Shadow a random pseudo-orbit by a true orbit.
    Shadow {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 200)]
        len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Shadow pseudo-orbits through the conjugacy between T and its transform, both ways.
    Transfer {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 200)]
        len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run property suites over seeded ensembles.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Spectral,
    Definitional,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Spectral,
    Fixedpoint,
    Iterates,
    Shadowing,
    Transfer,
    Quasihyp,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::Spectral => vec![Suite::Spectral],
            SuiteArg::Fixedpoint => vec![Suite::Fixedpoint],
            SuiteArg::Iterates => vec![Suite::Iterates],
            SuiteArg::Shadowing => vec![Suite::Shadowing],
            SuiteArg::Transfer => vec![Suite::Transfer],
            SuiteArg::Quasihyp => vec![Suite::Quasihyp],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

/// Failure modes mapped to exit codes.
enum Failure {
    /// Bad input: exit 2.
    Usage(String),
    /// Numerical error or failed check: exit 1.
    Check(String),
}

impl From<aluthge_lab::Error> for Failure {
    fn from(err: aluthge_lab::Error) -> Self {
        match err {
            aluthge_lab::Error::InvalidFormat(_)
            | aluthge_lab::Error::InvalidLambda(_)
            | aluthge_lab::Error::InvalidDelta(_)
            | aluthge_lab::Error::InvalidSpec(_)
            | aluthge_lab::Error::NotSquare { .. } => Failure::Usage(err.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    ComplexMatrix::from_json_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    text
}

/// Writes JSON to `path` if given, otherwise to stdout.
fn emit<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), Failure> {
    let text = to_json(value);
    match path {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct IterateSummary {
    steps: usize,
    lambda: f64,
    spectral_radius: f64,
    final_norm: f64,
    final_defect: f64,
    max_norm_increase: f64,
    stopped_early: bool,
}

#[derive(Serialize)]
struct ShadowSummary {
    verified: bool,
    dim: usize,
    length: usize,
    seed: u64,
    #[serde(flatten)]
    result: aluthge_lab::shadowing::ShadowResult,
}

#[derive(Serialize)]
struct TransferLeg {
    direction: &'static str,
    epsilon: f64,
    orbit_residual: f64,
    constant_bound: f64,
    slack: f64,
    within_bound: bool,
}

#[derive(Serialize)]
struct TransferSummary {
    lambda: f64,
    delta: f64,
    length: usize,
    seed: u64,
    legs: Vec<TransferLeg>,
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Transform { input, lambda, out } => {
            let t = read_matrix(&input)?;
            let d = aluthge_transform(&t, Lambda::new(lambda)?)?;
            let text = format!("{}\n", d.to_json_string());
            match out {
                Some(path) => write_text(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::Iterate { input, lambda, n, trace } => {
            let t = read_matrix(&input)?;
            let result = aluthge_iterates(&t, Lambda::new(lambda)?, n)?;
            if let Some(path) = trace {
                write_text(&path, &result.to_csv())?;
            }
            emit(
                &IterateSummary {
                    steps: result.len() - 1,
                    lambda,
                    spectral_radius: result.spectral_radius,
                    final_norm: result.final_norm(),
                    final_defect: result.final_defect(),
                    max_norm_increase: result.max_norm_increase(),
                    stopped_early: result.stopped_early,
                },
                None,
            )?;
            Ok(true)
        }
        Command::Spectrum { input, json } => {
            let t = read_matrix(&input)?;
            emit(&spectrum_report(&t)?, json.as_deref())?;
            Ok(true)
        }
        Command::Quasihyp { input, method, nmax, seed } => {
            let t = read_matrix(&input)?;
            let verdict = match method {
                Method::Spectral => is_quasi_hyperbolic_spectral(&t)?,
                Method::Definitional => quasi_hyperbolic_definitional(&t, nmax, SearchBudget::STANDARD, seed)?,
            };
            emit(&verdict, None)?;
            Ok(true)
        }
        Command::Shadow { input, delta, len, seed, json } => {
            let t = read_matrix(&input)?;
            let splitting = hyperbolic_splitting(&t)?;
            let orbit = generate_pseudo_orbit(&t, delta, len, seed)?;
            let result = shadow_orbit(&t, &splitting, &orbit)?;
            let verified = verify_shadowing(&t, &orbit, &result, result.constant_bound * delta + result.slack)?;
            emit(&ShadowSummary { verified, dim: orbit.dim(), length: len, seed, result }, json.as_deref())?;
            Ok(verified)
        }
        Command::Transfer { input, lambda, delta, len, seed } => {
            let t = read_matrix(&input)?;
            let lambda = Lambda::new(lambda)?;
            let transformed = aluthge_transform(&t, lambda)?;
            let forward = transfer_shadowing(&t, lambda, &generate_pseudo_orbit(&transformed, delta, len, seed)?)?;
            let backward = transfer_shadowing_back(&t, lambda, &generate_pseudo_orbit(&t, delta, len, seed)?)?;
            let legs: Vec<TransferLeg> = [("to_transform", forward), ("from_transform", backward)]
                .into_iter()
                .map(|(direction, r)| TransferLeg {
                    direction,
                    epsilon: r.epsilon,
                    orbit_residual: r.orbit_residual,
                    constant_bound: r.constant_bound,
                    slack: r.slack,
                    within_bound: r.within_bound(),
                })
                .collect();
            let ok = legs.iter().all(|leg| leg.within_bound);
            emit(&TransferSummary { lambda: lambda.value(), delta, length: len, seed, legs }, None)?;
            Ok(ok)
        }
        Command::Verify { suite, trials, seed, json } => {
            let run = run_suites(&suite.suites(), trials, seed, cli.stable_output);
            for report in &run.reports {
                eprintln!("{}", report.summary());
                for failure in report.failures.iter().take(5) {
                    eprintln!("  trial {} (seed {}): {}", failure.trial, failure.seed, failure.diagnostic);
                }
            }
            match (&suite, run.reports.as_slice()) {
                (SuiteArg::All, _) | (_, []) => emit(&run, json.as_deref())?,
                (_, [report]) => emit(report, json.as_deref())?,
                _ => emit(&run, json.as_deref())?,
            }
            Ok(run.passed)
        }
    }
}
