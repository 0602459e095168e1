use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use radii_core::delta::{build_blocks, delta, make_params};
use radii_core::linalg::{spectral_norm, spectral_radius, ComplexMatrix, ToleranceConfig};
use radii_core::radii::{aluthge_with, crawford_number, numerical_radius, operator_radius_rho, validate_rho, AngleSolverConfig};
use radii_core::suite::{check_matrix, run_suite, search_counterexamples, CheckId, EnsembleConfig, Family, SuiteReport};

mod grid;
mod matrix_file;

use grid::{parse_grid, parse_list};
use matrix_file::{read_matrix, MatrixFile};

/// Smallest ρ accepted by `sweep`; Δ's coefficients grow like ρ^{-1}.
const SWEEP_RHO_FLOOR: f64 = 1e-4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<radii_core::Error> for CliError {
    fn from(e: radii_core::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "radii", version, about = "Operator radii, numerical ranges and inequality checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one functional of a matrix.
    Compute(ComputeArgs),
    /// Run the inequality suite on a matrix or a random ensemble.
    Check(CheckArgs),
    /// Tabulate Δ over a (ρ, ν) grid as CSV.
    Sweep(SweepArgs),
    /// Record the smallest-slack witnesses per check.
    Search(SearchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Functional {
    Delta,
    Wrho,
    W,
    Norm,
    Crawford,
    SpectralRadius,
    Aluthge,
    Blocks,
}

#[derive(Args)]
struct SolverArgs {
    /// Coarse angle grid size for numerical-radius solves.
    #[arg(long)]
    coarse_points: Option<usize>,
    /// Relative tolerance for identities.
    #[arg(long)]
    tol_eq: Option<f64>,
    /// Relative tolerance for inequalities.
    #[arg(long)]
    tol_ineq: Option<f64>,
}

impl SolverArgs {
    fn apply(&self, solver: &mut AngleSolverConfig, tol: &mut ToleranceConfig) -> Result<(), CliError> {
        if let Some(n) = self.coarse_points {
            solver.coarse_points = n;
        }
        if let Some(t) = self.tol_eq {
            tol.rel_eq = t;
        }
        if let Some(t) = self.tol_ineq {
            tol.rel_ineq = t;
        }
        solver.validate()?;
        tol.validate()?;
        Ok(())
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    functional: Functional,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    /// Destination for matrix outputs (aluthge, blocks); stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct EnsembleArgs {
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    rho_grid: Option<String>,
    #[arg(long)]
    nu_grid: Option<String>,
    /// Comma-separated family names.
    #[arg(long)]
    families: Option<String>,
    #[arg(long)]
    dims: Option<String>,
    /// Samples per (family, dim).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated check ids.
    #[arg(long)]
    only: Option<String>,
    #[arg(long)]
    worst: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

impl EnsembleArgs {
    fn config(&self) -> Result<EnsembleConfig, CliError> {
        let mut cfg = EnsembleConfig {
            master_seed: self.seed,
            ..Default::default()
        };
        if let Some(r) = self.rho {
            cfg.rho_grid = vec![r];
        }
        if let Some(spec) = &self.rho_grid {
            cfg.rho_grid = parse_grid("rho-grid", spec)?;
        }
        if let Some(n) = self.nu {
            cfg.nu_grid = vec![n];
        }
        if let Some(spec) = &self.nu_grid {
            cfg.nu_grid = parse_grid("nu-grid", spec)?;
        }
        if let Some(spec) = &self.families {
            cfg.families = parse_list::<Family>("families", spec)?;
        }
        if let Some(spec) = &self.dims {
            cfg.dims = parse_list::<usize>("dims", spec)?;
        }
        if let Some(n) = self.samples {
            cfg.samples_per_cell = n;
        }
        if let Some(spec) = &self.only {
            cfg.only = Some(parse_list::<CheckId>("only", spec)?.into_iter().collect::<BTreeSet<_>>());
        }
        if let Some(k) = self.worst {
            cfg.worst_k = k;
        }
        let s = &mut cfg.settings;
        self.solver.apply(&mut s.solver, &mut s.tolerances)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct CheckArgs {
    /// Matrix file to check instead of an ensemble.
    #[arg(long, conflicts_with = "ensemble")]
    input: Option<PathBuf>,
    /// Check the random ensemble described by the other flags.
    #[arg(long)]
    ensemble: bool,
    #[command(flatten)]
    common: EnsembleArgs,
}

#[derive(Args)]
struct SearchArgs {
    /// Search a single matrix instead of the ensemble.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    common: EnsembleArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    rho_grid: String,
    #[arg(long)]
    nu_grid: String,
    /// CSV destination; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

fn fmt12(x: f64) -> String {
    format!("{x:.12}")
}

/// Writes via a temporary file in the target directory and renames it into
/// place, so readers never see a partial file.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::usage(format!("out: cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, contents.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::usage(format!("stdout: {e}")))
        }
    }
}

fn require(name: &str, v: Option<f64>) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::usage(format!("{name}: required for this functional")))
}

fn compute(args: &ComputeArgs) -> Result<(), CliError> {
    let mut solver = AngleSolverConfig::default();
    let mut tol = ToleranceConfig::default();
    args.solver.apply(&mut solver, &mut tol)?;
    let x = read_matrix(&args.input)?;
    x.require_square()?;
    let scalar = |v: f64| emit(None, &format!("{}\n", fmt12(v)));
    let matrix = |m: &ComplexMatrix| emit(args.out.as_deref(), &(MatrixFile::from_matrix(m).to_json() + "\n"));
    match args.functional {
        Functional::Delta => {
            let (rho, nu) = (require("rho", args.rho)?, require("nu", args.nu)?);
            scalar(delta(&x, rho, nu, &solver)?)
        }
        Functional::Wrho => scalar(operator_radius_rho(&x, require("rho", args.rho)?, &solver)?),
        Functional::W => scalar(numerical_radius(&x, &solver)?),
        Functional::Norm => scalar(spectral_norm(&x)),
        Functional::Crawford => scalar(crawford_number(&x, &solver)?),
        Functional::SpectralRadius => scalar(spectral_radius(&x)?),
        Functional::Aluthge => matrix(&aluthge_with(&x, &tol)?),
        Functional::Blocks => {
            let p = make_params(require("rho", args.rho)?, require("nu", args.nu)?)?;
            matrix(&build_blocks(&x, &p)?.h)
        }
    }
}

fn summarize(report: &SuiteReport) {
    let mut err = std::io::stderr().lock();
    for c in &report.checks {
        if !c.pass {
            let _ = writeln!(err, "FAIL {}: {} of {} evaluations, min slack {:?}", c.id, c.failures, c.count, c.min_slack);
        }
    }
    let total: u64 = report.checks.iter().map(|c| c.count).sum();
    let verdict = if report.pass { "pass" } else { "fail" };
    let _ = writeln!(err, "{verdict}: {} checks, {total} evaluations, {:.1}s", report.checks.len(), report.elapsed.as_secs_f64());
}

fn finish_report(report: &SuiteReport, out: Option<&Path>) -> Result<(), CliError> {
    emit(out, &(report.to_json() + "\n"))?;
    summarize(report);
    if report.pass {
        Ok(())
    } else {
        Err(CliError {
            code: 1,
            message: "one or more checks failed".into(),
        })
    }
}

fn check(args: &CheckArgs) -> Result<(), CliError> {
    let cfg = args.common.config()?;
    let report = match (&args.input, args.ensemble) {
        (Some(path), _) => check_matrix(&read_matrix(path)?, &cfg, false)?,
        (None, true) => run_suite(&cfg)?,
        (None, false) => return Err(CliError::usage("input: give --input PATH or --ensemble")),
    };
    finish_report(&report, args.common.out.as_deref())
}

fn search(args: &SearchArgs) -> Result<(), CliError> {
    let cfg = args.common.config()?;
    let report = match &args.input {
        Some(path) => check_matrix(&read_matrix(path)?, &cfg, true)?,
        None => search_counterexamples(&cfg)?,
    };
    finish_report(&report, args.common.out.as_deref())
}

fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let mut solver = AngleSolverConfig::default();
    let mut tol = ToleranceConfig::default();
    args.solver.apply(&mut solver, &mut tol)?;
    let rhos = parse_grid("rho-grid", &args.rho_grid)?;
    let nus = parse_grid("nu-grid", &args.nu_grid)?;
    for &r in &rhos {
        validate_rho(r).map_err(|e| CliError::usage(format!("rho-grid: {e}")))?;
        if r < SWEEP_RHO_FLOOR {
            return Err(CliError::usage(format!("rho-grid: {r} is below the sweep floor {SWEEP_RHO_FLOOR}")));
        }
    }
    for &n in &nus {
        radii_core::delta::validate_nu(n).map_err(|e| CliError::usage(format!("nu-grid: {e}")))?;
    }
    let x = read_matrix(&args.input)?;
    x.require_square()?;
    let norm = spectral_norm(&x);
    let w = numerical_radius(&x, &solver)?;
    let blocks: Vec<Vec<[f64; 4]>> = rhos
        .par_iter()
        .map(|&rho| {
            let w_rho = operator_radius_rho(&x, rho, &solver)?;
            nus.iter()
                .map(|&nu| Ok([rho, nu, delta(&x, rho, nu, &solver)?, w_rho]))
                .collect::<radii_core::Result<Vec<_>>>()
        })
        .collect::<radii_core::Result<_>>()?;
    let mut csv = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::usage(format!("out: {e}"));
    csv.write_record(["rho", "nu", "delta", "spectral_norm", "numerical_radius", "w_rho"])
        .map_err(csv_err)?;
    for [rho, nu, d, w_rho] in blocks.into_iter().flatten() {
        csv.write_record([rho, nu, d, norm, w, w_rho].map(fmt12)).map_err(csv_err)?;
    }
    let bytes = csv.into_inner().map_err(|e| CliError::usage(format!("out: {e}")))?;
    emit(args.out.as_deref(), &String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Ok(v) = std::env::var("RADII_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::usage(format!("RADII_THREADS: expected a positive integer, got '{v}'")))?;
        // Fails only if a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Compute(a) => compute(a),
        Command::Check(a) => check(a),
        Command::Sweep(a) => sweep(a),
        Command::Search(a) => search(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
