//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure on output, 2 usage error, 3 input
//! parse error, 4 check failure, 5 optimizer non-convergence.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::GleasonError;
use crate::hilbert::{
    derive_seed, frobenius_distance, haar_random_basis, random_density_matrix, random_real_density_matrix, CMatrix,
    DensityMatrix, FieldMode, UnitVector,
};
use crate::reconstruct::{
    transition_matrix, BasisChoice, ImplicitConfig, MethodSettings, Registry, EXPLICIT_REAL, IMPLICIT, PAULI_2D,
};
use crate::serial::{matrix_from_json, matrix_to_json, vector_from_value};
use crate::valuation::{ExactOracle, NoisyOracle, TabulatedOracle, ValuationOracle};
use crate::verify::{
    check_additivity, check_basis_independence, check_density, check_haar_moment, check_transition_relation,
    check_unistochastic, CheckReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_CHECK: i32 = 4;
pub const EXIT_NONCONVERGENCE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "gleason", version, about = "Density-matrix reconstruction from probability valuations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random density matrix.
    Gen(GenArgs),
    /// Evaluate a state's valuation and write a tabulated-oracle file.
    Tabulate(TabulateArgs),
    /// Reconstruct a density matrix from a valuation oracle.
    Reconstruct(ReconstructArgs),
    /// Run identity checks and print a summary.
    Verify(VerifyArgs),
    /// Frobenius distance between two matrix or report files.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub dim: usize,
    /// Defaults to full rank.
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Real symmetric state.
    #[arg(long)]
    pub real: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TabulateArgs {
    /// State file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// JSON list of vectors to evaluate; otherwise the rays `--method` queries.
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    #[arg(long, default_value = "explicit")]
    pub method: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub shots: u64,
    #[arg(long, default_value_t = 1000)]
    pub num_bases: usize,
    #[arg(long, value_enum, default_value_t = BasisKind::Standard)]
    pub basis: BasisKind,
    #[arg(long)]
    pub real: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisKind {
    Standard,
    Haar,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long, default_value = "explicit")]
    pub method: String,
    /// State file or tabulated-oracle file (detected from content).
    #[arg(long = "in", conflicts_with = "rank")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Measurement shots per query; 0 queries the exact valuation.
    #[arg(long, default_value_t = 0)]
    pub shots: u64,
    #[arg(long, default_value_t = 1000)]
    pub num_bases: usize,
    #[arg(long, value_enum, default_value_t = BasisKind::Standard)]
    pub basis: BasisKind,
    /// Convergence threshold of the implicit optimizer.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Restrict the oracle to real vectors.
    #[arg(long)]
    pub real: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Density,
    Additivity,
    Unistochastic,
    HaarMoment,
    BasisIndependence,
    Transition,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Matrix or report file; a random state is generated when absent.
    #[arg(long = "in", conflicts_with = "rank")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub shots: u64,
    /// Monte Carlo samples for the Haar moment check.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 5)]
    pub num_bases: usize,
    /// Overrides every deterministic check tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

/// A failed command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn input(path: &Path, e: impl std::fmt::Display) -> Self {
        Self { code: EXIT_PARSE, message: format!("{}: {e}", path.display()) }
    }

    /// Classifies an error raised while computing.
    fn from_run(e: GleasonError) -> Self {
        let code = match &e {
            GleasonError::NonConvergence(_) => EXIT_NONCONVERGENCE,
            GleasonError::TableMiss { .. } | GleasonError::Parse(_) => EXIT_PARSE,
            GleasonError::FieldMismatch { .. }
            | GleasonError::UnsupportedDimension { .. }
            | GleasonError::UnknownMethod(_)
            | GleasonError::ZeroDimension
            | GleasonError::EmptyInput
            | GleasonError::RankOutOfRange { .. } => EXIT_USAGE,
            _ => EXIT_IO,
        };
        Self { code, message: e.to_string() }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Tabulate(a) => cmd_tabulate(&a),
        Command::Reconstruct(a) => cmd_reconstruct(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Compare(a) => cmd_compare(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Writes to standard output, ignoring a closed pipe.
fn stdout(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit(out: Option<&Path>, text: &str) -> std::result::Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure { code: EXIT_IO, message: format!("cannot write {}: {e}", path.display()) }),
        None => {
            stdout(&format!("{text}\n"));
            Ok(())
        }
    }
}

fn read_json(path: &Path) -> std::result::Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(path, e))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(path, e))
}

/// A matrix file, or the `estimate` of a report file.
fn read_matrix(path: &Path) -> std::result::Result<CMatrix, Failure> {
    let value = read_json(path)?;
    let matrix = value.get("estimate").unwrap_or(&value);
    matrix_from_json(&matrix.to_string()).map_err(|e| Failure::input(path, e))
}

fn read_state(path: &Path) -> std::result::Result<DensityMatrix, Failure> {
    DensityMatrix::new(read_matrix(path)?).map_err(|e| Failure::input(path, e))
}

fn generate_state(dim: usize, rank: Option<usize>, seed: u64, real: bool) -> std::result::Result<DensityMatrix, Failure> {
    let rank = rank.unwrap_or(dim);
    if real { random_real_density_matrix(dim, rank, seed) } else { random_density_matrix(dim, rank, seed) }
        .map_err(Failure::from_run)
}

pub fn cmd_gen(args: &GenArgs) -> CmdResult {
    let state = generate_state(args.dim, args.rank, args.seed, args.real)?;
    emit(args.out.as_deref(), &matrix_to_json(state.matrix()))?;
    Ok(EXIT_OK)
}

fn state_oracle(state: DensityMatrix, field: FieldMode, shots: u64, seed: u64) -> std::result::Result<Box<dyn ValuationOracle>, Failure> {
    let oracle: Box<dyn ValuationOracle> = if shots == 0 {
        Box::new(ExactOracle::with_field(state, field).map_err(Failure::from_run)?)
    } else {
        let noisy = NoisyOracle::new(state, shots, derive_seed(seed, 1));
        match field {
            FieldMode::Complex => Box::new(noisy),
            FieldMode::Real => Box::new(noisy.in_real_mode().map_err(Failure::from_run)?),
        }
    };
    Ok(oracle)
}

fn settings(method: &str, basis: BasisKind, num_bases: usize, seed: u64, tol: Option<f64>) -> std::result::Result<MethodSettings, Failure> {
    if !Registry::default().contains(method) {
        let known: Vec<_> = Registry::default().names().collect();
        return Err(Failure::usage(format!("unknown method `{method}` (expected one of {})", known.join(", "))));
    }
    let mut implicit = ImplicitConfig { seed, ..ImplicitConfig::default() };
    if let Some(t) = tol {
        if t.is_nan() || t <= 0.0 {
            return Err(Failure::usage("--tol must be positive"));
        }
        implicit.move_tolerance = t;
    }
    let basis = match basis {
        BasisKind::Standard => BasisChoice::Standard,
        BasisKind::Haar => BasisChoice::Haar { seed },
    };
    Ok(MethodSettings { basis, num_bases, seed, implicit })
}

fn field_for(method: &str, real: bool) -> FieldMode {
    if real || method == EXPLICIT_REAL { FieldMode::Real } else { FieldMode::Complex }
}

pub fn cmd_tabulate(args: &TabulateArgs) -> CmdResult {
    let state = read_state(&args.input)?;
    let field = field_for(&args.method, args.real);
    let oracle = state_oracle(state, field, args.shots, args.seed)?;
    let table = match &args.vectors {
        Some(path) => {
            let list = read_json(path)?;
            let rays = list
                .as_array()
                .ok_or_else(|| Failure::input(path, "expected a JSON list of vectors"))?
                .iter()
                .map(|v| vector_from_value(v).and_then(|x| UnitVector::normalize(&x)))
                .collect::<crate::error::Result<Vec<_>>>()
                .map_err(|e| Failure::input(path, e))?;
            TabulatedOracle::tabulate(oracle.as_ref(), &rays).map_err(Failure::from_run)?
        }
        None => {
            let s = settings(&args.method, args.basis, args.num_bases, args.seed, None)?;
            let method = Registry::default().build(&args.method, &s).map_err(Failure::from_run)?;
            TabulatedOracle::record(oracle.as_ref(), |o| method.reconstruct(o)).map_err(Failure::from_run)?.1
        }
    };
    emit(args.out.as_deref(), &table.to_json())?;
    Ok(EXIT_OK)
}

/// Where the valuation of a reconstruct run comes from.
pub enum Source {
    Generated { dim: usize, rank: Option<usize> },
    State(DensityMatrix),
    Table(TabulatedOracle),
}

/// Validated reconstruct configuration.
pub struct RunConfig {
    pub method: String,
    pub source: Source,
    pub field: FieldMode,
    pub seed: u64,
    pub shots: u64,
    pub settings: MethodSettings,
}

impl RunConfig {
    pub fn from_args(args: &ReconstructArgs) -> std::result::Result<Self, Failure> {
        let settings = settings(&args.method, args.basis, args.num_bases, args.seed, args.tol)?;
        let pauli = args.method == PAULI_2D;
        let source = match &args.input {
            Some(path) => {
                let value = read_json(path)?;
                if value.is_array() {
                    if args.shots > 0 {
                        return Err(Failure::usage("--shots cannot be combined with a tabulated oracle"));
                    }
                    Source::Table(TabulatedOracle::from_json(&value.to_string()).map_err(|e| Failure::input(path, e))?)
                } else {
                    Source::State(read_state(path)?)
                }
            }
            None => {
                let dim = match (args.dim, pauli) {
                    (Some(d), _) => d,
                    (None, true) => 2,
                    (None, false) => return Err(Failure::usage("either --in or --dim is required")),
                };
                Source::Generated { dim, rank: args.rank }
            }
        };
        let dim = match &source {
            Source::Generated { dim, .. } => *dim,
            Source::State(s) => s.dim(),
            Source::Table(t) => t.dim(),
        };
        if args.dim.is_some_and(|d| d != dim) {
            return Err(Failure::usage(format!("--dim {} does not match the input dimension {dim}", args.dim.unwrap_or(0))));
        }
        if pauli && dim != 2 {
            return Err(Failure::usage(format!("{PAULI_2D} requires dimension 2, got {dim}")));
        }
        if args.tol.is_some() && args.method != IMPLICIT {
            return Err(Failure::usage("--tol applies only to the implicit method"));
        }
        Ok(Self {
            method: args.method.clone(),
            source,
            field: field_for(&args.method, args.real),
            seed: args.seed,
            shots: args.shots,
            settings,
        })
    }

    fn oracle(self) -> std::result::Result<Box<dyn ValuationOracle>, Failure> {
        match self.source {
            Source::Table(t) => Ok(Box::new(t)),
            Source::State(s) => state_oracle(s, self.field, self.shots, self.seed),
            Source::Generated { dim, rank } => {
                let state = generate_state(dim, rank, self.seed, self.field == FieldMode::Real)?;
                state_oracle(state, self.field, self.shots, self.seed)
            }
        }
    }
}

pub fn cmd_reconstruct(args: &ReconstructArgs) -> CmdResult {
    let config = RunConfig::from_args(args)?;
    let method = Registry::default().build(&config.method, &config.settings).map_err(Failure::from_run)?;
    let oracle = config.oracle()?;
    let report = method.reconstruct(oracle.as_ref()).map_err(Failure::from_run)?;
    emit(args.out.as_deref(), &report.to_json())?;
    Ok(EXIT_OK)
}

fn table(reports: &[CheckReport]) -> String {
    let mut s = format!("{:<20} {:<6} {:>12} {:>12}\n", "check", "result", "deviation", "tolerance");
    for r in reports {
        let result = if r.pass { "pass" } else { "FAIL" };
        s.push_str(&format!("{:<20} {:<6} {:>12.3e} {:>12.3e}\n", r.check, result, r.deviation, r.tolerance));
    }
    s
}

pub fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let matrix = match &args.input {
        Some(path) => read_matrix(path)?,
        None => generate_state(args.dim.unwrap_or(3), args.rank, args.seed, false)?.into_matrix(),
    };
    let dim = matrix.nrows();
    if args.input.is_some() && args.dim.is_some_and(|d| d != dim) {
        return Err(Failure::usage(format!("--dim does not match the input dimension {dim}")));
    }
    let wants = |s: Suite| args.suite == s || args.suite == Suite::All;
    let tol = |default: f64| args.tol.unwrap_or(default);
    let mut reports = Vec::new();
    let density = check_density(&matrix, tol(1e-10));
    let valid = density.pass;
    if wants(Suite::Density) {
        reports.push(density);
    }
    let needs_state = [Suite::Additivity, Suite::BasisIndependence, Suite::Transition].into_iter().any(wants);
    if needs_state && valid {
        let state = DensityMatrix::new(matrix.clone()).map_err(|e| Failure::usage(format!("input state: {e}")))?;
        if wants(Suite::Additivity) {
            let oracle = state_oracle(state.clone(), FieldMode::Complex, args.shots, args.seed)?;
            let default = if args.shots == 0 { 1e-10 } else { 5.0 / (args.shots as f64).sqrt() };
            reports.push(check_additivity(oracle.as_ref(), args.trials, args.seed, tol(default)).map_err(Failure::from_run)?);
        }
        if wants(Suite::BasisIndependence) {
            let oracle = ExactOracle::new(state.clone());
            reports.push(
                check_basis_independence(&oracle, args.num_bases, args.seed, tol(1e-10)).map_err(Failure::from_run)?,
            );
        }
        if wants(Suite::Transition) {
            let p = haar_random_basis(dim, derive_seed(args.seed, 7)).map_err(Failure::from_run)?;
            reports.push(check_transition_relation(&state, &p, tol(1e-12)).map_err(Failure::from_run)?);
        }
    } else if needs_state && args.suite != Suite::All {
        return Err(Failure::input(args.input.as_deref().unwrap_or(Path::new("-")), "input is not a density matrix"));
    }
    if wants(Suite::Unistochastic) {
        let q = haar_random_basis(dim, derive_seed(args.seed, 8)).map_err(Failure::from_run)?;
        let p = haar_random_basis(dim, derive_seed(args.seed, 9)).map_err(Failure::from_run)?;
        let s = transition_matrix(&q, &p).map_err(Failure::from_run)?;
        reports.push(check_unistochastic(&s, tol(1e-12)));
    }
    if wants(Suite::HaarMoment) {
        reports.push(check_haar_moment(dim, args.samples, args.seed).map_err(|e| Failure::usage(e.to_string()))?);
    }
    let summary = serde_json::to_string_pretty(&reports).expect("reports serialize");
    stdout(&table(&reports));
    match &args.out {
        Some(_) => emit(args.out.as_deref(), &summary)?,
        None => stdout(&format!("{summary}\n")),
    }
    Ok(if reports.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_CHECK })
}

pub fn cmd_compare(args: &CompareArgs) -> CmdResult {
    let a = read_matrix(&args.a)?;
    let b = read_matrix(&args.b)?;
    if a.shape() != b.shape() {
        return Err(Failure::usage(format!("dimension mismatch: {} vs {}", a.nrows(), b.nrows())));
    }
    let distance = frobenius_distance(&a, &b);
    let pass = distance <= args.tol;
    stdout(&format!("{}\n", json!({"distance": distance, "tolerance": args.tol, "pass": pass})));
    Ok(if pass { EXIT_OK } else { EXIT_CHECK })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("gleason").chain(args.iter().copied())).unwrap()
    }

    fn reconstruct_args(args: &[&str]) -> ReconstructArgs {
        match parse(&[&["reconstruct"], args].concat()).command {
            Command::Reconstruct(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn pauli_defaults_to_qubit_and_rejects_other_dims() {
        let cfg = RunConfig::from_args(&reconstruct_args(&["--method", "pauli2d"])).unwrap();
        assert!(matches!(cfg.source, Source::Generated { dim: 2, .. }));
        let err = RunConfig::from_args(&reconstruct_args(&["--method", "pauli2d", "--dim", "3"])).err().unwrap();
        assert_eq!(err.code, EXIT_USAGE);
    }

    #[test]
    fn missing_source_and_unknown_method_are_usage_errors() {
        assert_eq!(RunConfig::from_args(&reconstruct_args(&[])).err().unwrap().code, EXIT_USAGE);
        let err = RunConfig::from_args(&reconstruct_args(&["--method", "nope", "--dim", "2"])).err().unwrap();
        assert_eq!(err.code, EXIT_USAGE);
    }

    #[test]
    fn in_and_rank_conflict() {
        assert!(Cli::try_parse_from(["gleason", "reconstruct", "--in", "x.json", "--rank", "1"]).is_err());
    }

    #[test]
    fn explicit_real_selects_real_field() {
        let cfg = RunConfig::from_args(&reconstruct_args(&["--method", "explicit-real", "--dim", "3"])).unwrap();
        assert_eq!(cfg.field, FieldMode::Real);
    }

    #[test]
    fn error_classification() {
        assert_eq!(Failure::from_run(GleasonError::Parse("x".into())).code, EXIT_PARSE);
        assert_eq!(Failure::from_run(GleasonError::UnknownMethod("x".into())).code, EXIT_USAGE);
    }

    #[test]
    fn table_lists_every_check() {
        let r = vec![
            CheckReport::new("density", 0.0, 1e-10, json!({})),
            CheckReport::new("haar-moment", 9.0, 4.0, json!({})),
        ];
        let t = table(&r);
        assert_eq!(t.lines().count(), 3);
        assert!(t.contains("FAIL"));
    }
}
