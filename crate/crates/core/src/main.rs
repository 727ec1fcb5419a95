use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use robin_spectral::config::RunConfig;
use robin_spectral::domain::{DomainSpec, ModeSpec, RobinProblem};
use robin_spectral::shape::{
    derivative_report, fd_derivative, find_stationary_annulus, hadamard_derivative, BoundaryField,
};
use robin_spectral::solver::{assemble_spectrum, first_eigenpair, mode_eigenvalues, SolverConfig};
use robin_spectral::suite::{run_suite, write_outputs, Suite};
use robin_spectral::table::{format_float, Table};
use robin_spectral::Error;

#[derive(Parser)]
#[command(name = "robin-spectral", version, about = "Robin Laplacian eigenvalues on balls and annuli")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest eigenvalues of a ball or annulus.
    Eig(EigArgs),
    /// λ₁ and the outer-field shape derivative along a family of annuli.
    Sweep(SweepArgs),
    /// Run verification checks and write CSV tables plus a JSON summary.
    Verify(VerifyArgs),
    /// Hadamard shape derivative against central finite differences.
    Derivative(DerivativeArgs),
}

#[derive(Args)]
#[group(id = "shape", required = true, multiple = false)]
struct ShapeArgs {
    /// Ball of radius R.
    #[arg(long, allow_negative_numbers = true, value_name = "R")]
    ball: Option<f64>,
    /// Annulus with radii R1 < R2.
    #[arg(long, num_args = 2, value_names = ["R1", "R2"])]
    annulus: Option<Vec<f64>>,
}

#[derive(Args)]
struct EigArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Restrict to one angular mode.
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Highest angular mode merged into the spectrum.
    #[arg(long, default_value_t = 6)]
    l_max: usize,
    /// Also write eig.csv into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, allow_negative_numbers = true)]
    r1: f64,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    r2_from: f64,
    #[arg(long, allow_negative_numbers = true)]
    r2_to: f64,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Also write sweep.csv into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all", value_parser = parse_suite)]
    suite: Suite,
    /// Strict JSON run configuration; built-in defaults when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding the configuration's out_dir.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldKind {
    /// Unit normal velocity on the outer circle.
    Outer,
    /// Volume-preserving: outer weight 1, inner weight −r₂/r₁.
    Pair,
}

#[derive(Args)]
struct DerivativeArgs {
    #[arg(long, num_args = 2, value_names = ["R1", "R2"], required = true)]
    annulus: Vec<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-4, allow_negative_numbers = true)]
    fd_step: f64,
    /// Largest accepted relative discrepancy.
    #[arg(long, default_value_t = 1e-4)]
    threshold: f64,
    #[arg(long, value_enum, default_value_t = FieldKind::Outer)]
    field: FieldKind,
    /// Move to the annulus with the same r2² − r1² on which the pair
    /// derivative vanishes, and check both values against zero there.
    #[arg(long)]
    stationary: bool,
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Check,
    Input(String),
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::FdStep { .. } => Failure::Input(e.to_string()),
            other => Failure::Solver(other.to_string()),
        }
    }
}

fn input<T>(r: robin_spectral::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Input(e.to_string()))
}

fn solver_config(tol: Option<f64>) -> Result<SolverConfig, Failure> {
    match tol {
        None => Ok(SolverConfig::default()),
        Some(t) if t.is_finite() && t > 0.0 => Ok(SolverConfig::with_tolerance(t)),
        Some(t) => Err(Failure::Input(format!("--tol must be > 0, got {t}"))),
    }
}

fn domain_from(shape: &ShapeArgs, dim: usize) -> Result<DomainSpec, Failure> {
    match (shape.ball, &shape.annulus) {
        (Some(r), None) => input(DomainSpec::ball(dim, r)),
        (None, Some(v)) => input(DomainSpec::annulus(dim, v[0], v[1])),
        _ => Err(Failure::Input("exactly one of --ball or --annulus is required".into())),
    }
}

fn write_table(dir: &Path, table: &Table) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .and_then(|_| table.write_to(dir))
        .map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))
}

fn cmd_eig(args: EigArgs) -> Result<(), Failure> {
    let cfg = solver_config(args.tol)?;
    let domain = domain_from(&args.shape, args.dim)?;
    let problem = input(RobinProblem::new(domain, args.alpha))?;
    if args.count == 0 {
        return Err(Failure::Input("--count must be >= 1".into()));
    }
    let mut table = Table::new("eig.csv", &["index", "lambda", "ell", "n", "multiplicity", "residual"]);
    match args.ell {
        Some(ell) => {
            let mode = ModeSpec::new(args.dim, ell);
            for (i, p) in mode_eigenvalues(&problem, mode, args.count, &cfg)?.iter().enumerate() {
                let m = mode.multiplicity() as f64;
                table.push(vec![(i + 1) as f64, p.lambda, ell as f64, p.n as f64, m, p.boundary_residuals().max_abs()]);
            }
        }
        None => {
            let spectrum = assemble_spectrum(&problem, args.l_max, args.count, &cfg)?;
            for (i, e) in spectrum.entries.iter().enumerate() {
                let (first, _) = spectrum.index_range(i);
                table.push(vec![first as f64, e.lambda, e.ell as f64, e.n as f64, e.multiplicity as f64, e.residual]);
            }
        }
    }
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{:>5} {:>24} {:>4} {:>3} {:>4} {:>10}", "index", "lambda", "ell", "n", "mult", "residual");
    for row in &table.rows {
        let _ = writeln!(
            out,
            "{:>5} {:>24} {:>4} {:>3} {:>4} {:>10.1e}",
            row[0],
            format_float(row[1]),
            row[2],
            row[3],
            row[4],
            row[5]
        );
    }
    if let Some(dir) = &args.out {
        write_table(dir, &table)?;
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let cfg = solver_config(args.tol)?;
    if args.steps == 0 {
        return Err(Failure::Input("--steps must be >= 1".into()));
    }
    if !(args.r2_from > args.r1) || args.r2_to < args.r2_from {
        return Err(Failure::Input("need r1 < r2-from <= r2-to".into()));
    }
    let radii: Vec<f64> = (0..args.steps)
        .map(|i| {
            if args.steps == 1 {
                args.r2_from
            } else {
                args.r2_from + (args.r2_to - args.r2_from) * i as f64 / (args.steps - 1) as f64
            }
        })
        .collect();
    let problems = radii
        .iter()
        .map(|&r2| input(DomainSpec::annulus(2, args.r1, r2).and_then(|d| RobinProblem::new(d, args.alpha))))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new("sweep.csv", &["r2", "lambda1", "hadamard_outer"]);
    for (p, &r2) in problems.iter().zip(&radii) {
        let pair = first_eigenpair(p, &cfg)?;
        table.push(vec![r2, pair.lambda, hadamard_derivative(&pair, &BoundaryField::OuterNormal)?]);
    }
    print!("{}", table.to_csv());
    if let Some(dir) = &args.out {
        write_table(dir, &table)?;
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let mut config = match &args.config {
        Some(path) => input(RunConfig::load(path))?,
        None => RunConfig::default(),
    };
    if let Some(t) = args.tol {
        config.tol = t;
        input(config.validate())?;
    }
    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from(&config.out_dir));
    let outcomes = run_suite(args.suite, &config);
    std::fs::create_dir_all(&dir)
        .and_then(|_| write_outputs(&dir, &outcomes))
        .map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    let mut out = std::io::stdout().lock();
    for o in &outcomes {
        let r = &o.report;
        let status = if o.errored {
            "ERROR"
        } else if r.passed {
            "PASS"
        } else {
            "FAIL"
        };
        let _ = writeln!(out, "{status:<5} {:<24} margin {}", r.check_name, format_float(r.margin));
        if let Some(d) = &r.diagnostics {
            let _ = writeln!(out, "      {d}");
        }
    }
    let _ = writeln!(out, "summary: {}", dir.join(robin_spectral::suite::SUMMARY_FILE).display());
    if let Some(o) = outcomes.iter().find(|o| o.errored) {
        let msg = o.report.diagnostics.clone().unwrap_or_default();
        return Err(Failure::Solver(format!("{}: {msg}", o.report.check_name)));
    }
    if outcomes.iter().all(|o| o.report.passed) {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_derivative(args: DerivativeArgs) -> Result<(), Failure> {
    let cfg = solver_config(args.tol)?;
    let (r1, r2) = (args.annulus[0], args.annulus[1]);
    let problem = input(DomainSpec::annulus(2, r1, r2).and_then(|d| RobinProblem::new(d, args.alpha)))?;
    if !(args.threshold > 0.0) {
        return Err(Failure::Input("--threshold must be > 0".into()));
    }
    if args.stationary {
        if !matches!(args.field, FieldKind::Pair) {
            return Err(Failure::Input("--stationary needs --field pair".into()));
        }
        let c = r2 * r2 - r1 * r1;
        let Some((s1, s2)) = find_stationary_annulus(c, args.alpha, (0.02 * r2, 3.0 * r2), 60, &cfg)? else {
            return Err(Failure::Solver(format!("G has no zero along r2^2 - r1^2 = {c} at alpha = {}", args.alpha)));
        };
        let p = input(DomainSpec::annulus(2, s1, s2).and_then(|d| RobinProblem::new(d, args.alpha)))?;
        let field = BoundaryField::volume_preserving(1.0, s1, s2);
        let pair = first_eigenpair(&p, &cfg)?;
        let hadamard = hadamard_derivative(&pair, &field)?;
        let fd = fd_derivative(&p, &field, args.fd_step, &cfg)?;
        // size of the unconstrained derivative at the same annulus
        let scale = hadamard_derivative(&pair, &BoundaryField::OuterNormal)?.abs();
        let passed = hadamard.abs() <= args.threshold * scale && fd.abs() <= args.threshold * scale;
        println!(
            "{}",
            json!({
                "r1": s1,
                "r2": s2,
                "alpha": args.alpha,
                "hadamard_value": hadamard,
                "fd_value": fd,
                "fd_step": args.fd_step,
                "scale": scale,
                "threshold": args.threshold,
                "passed": passed,
            })
        );
        return if passed { Ok(()) } else { Err(Failure::Check) };
    }
    let field = match args.field {
        FieldKind::Outer => BoundaryField::OuterNormal,
        FieldKind::Pair => BoundaryField::volume_preserving(1.0, r1, r2),
    };
    let report = derivative_report(&problem, &field, args.fd_step, &cfg)?;
    let passed = report.rel_discrepancy <= args.threshold;
    let mut value = serde_json::to_value(report).expect("report serialises");
    value["threshold"] = json!(args.threshold);
    value["passed"] = json!(passed);
    println!("{value}");
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Eig(a) => cmd_eig(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Derivative(a) => cmd_derivative(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("{}", json!({ "error": "invalid_input", "message": msg }));
            ExitCode::from(2)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("{}", json!({ "error": "solver_failure", "message": msg }));
            ExitCode::from(3)
        }
    }
}
