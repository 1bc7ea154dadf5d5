//! `rotinv`: classify rotationally invariant bipartite states, export the
//! 4⊗N and ϑ₁-invariant geometry, sweep the Breuer-detected region, and run
//! the self-check suite.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or input
//! error.

mod output;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rotinv::geometry::{geometry_report, region_sweep};
use rotinv::verify::{render_table, run_suite, VerifyOptions};
use rotinv::{classify, AlphaVector, BetaVector, SpinPair, DEFAULT_TOL};

#[derive(Parser, Debug)]
#[command(name = "rotinv", version, about = "SO(3)-invariant bipartite states in the alpha/beta parameter spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify one state given by alpha or beta coordinates.
    Classify(ClassifyArgs),
    /// Export named points and hyperplanes for an even-n1 system.
    Geometry(GeometryArgs),
    /// Grid sweep of the theta1-invariant polytope, classified by the Breuer test.
    Sweep(SweepArgs),
    /// Run the identity, orthogonality and oracle checks.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct SystemArgs {
    /// Dimension of the first subsystem (2 j1 + 1).
    #[arg(long)]
    n1: u32,
    /// Dimension of the second subsystem, at least n1.
    #[arg(long)]
    n2: u32,
}

impl SystemArgs {
    fn system(&self) -> Result<SpinPair, Failure> {
        SpinPair::new(self.n1, self.n2).map_err(Failure::input)
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Comma-separated alpha coordinates, J increasing.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "beta", required_unless_present = "beta")]
    alpha: Option<String>,
    /// Comma-separated beta coordinates, K = 0, 1, ...
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct GeometryArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Cells per axis of the bounding box.
    #[arg(long, default_value_t = 200)]
    grid: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Add the randomized dense-matrix comparisons.
    #[arg(long)]
    deep: bool,
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    seed: u64,
    /// Random states per system in deep mode.
    #[arg(long, default_value_t = VerifyOptions::default().samples)]
    samples: usize,
    /// Shift L[0][0] by this amount before checking; must make the run fail.
    #[arg(long, hide = true, allow_hyphen_values = true)]
    perturb_l: Option<f64>,
    /// Machine-readable output instead of the table.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[command(flatten)]
    output: OutputArgs,
}

/// A reason to stop with a non-zero exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    Checks,
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Classify(args) => cmd_classify(&args),
        Command::Geometry(args) => cmd_geometry(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Verify(args) => cmd_verify(&args),
    }
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Failure::Input(format!("--tol must be a positive finite number, got {tol}")))
    }
}

fn parse_coords(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|field| {
            let field = field.trim();
            match field.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(Failure::Input(format!("malformed coordinate {field:?}"))),
            }
        })
        .collect()
}

fn emit(output: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()).map_err(Failure::input)
        }
    }
}

fn cmd_classify(args: &ClassifyArgs) -> Result<(), Failure> {
    check_tol(args.tol)?;
    let system = args.system.system()?;
    let beta = match (&args.alpha, &args.beta) {
        (Some(a), _) => rotinv::alpha_to_beta(&AlphaVector::new(system, parse_coords(a)?).map_err(Failure::input)?),
        (None, Some(b)) => BetaVector::new(system, parse_coords(b)?).map_err(Failure::input)?,
        (None, None) => return Err(Failure::Input("one of --alpha or --beta is required".into())),
    };
    let report = classify(&beta, args.tol);
    let text = match args.format {
        Format::Json => output::json(&report)?,
        Format::Csv => output::classification_csv(&report)?,
    };
    emit(&args.output, &text)
}

fn cmd_geometry(args: &GeometryArgs) -> Result<(), Failure> {
    let report = geometry_report(args.system.system()?).map_err(Failure::input)?;
    let text = match args.format {
        Format::Json => output::json(&output::geometry_json(&report))?,
        Format::Csv => output::geometry_csv(&report)?,
    };
    emit(&args.output, &text)
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    check_tol(args.tol)?;
    let system = args.system.system()?;
    let sweep = region_sweep(system, args.grid, args.tol).map_err(Failure::input)?;
    let text = match args.format {
        Format::Json => output::json(&output::sweep_json(&sweep))?,
        Format::Csv => output::sweep_csv(&sweep)?,
    };
    emit(&args.output, &text)
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let opts = VerifyOptions { deep: args.deep, seed: args.seed, samples: args.samples, perturb_l: args.perturb_l };
    let checks = run_suite(&opts).map_err(Failure::input)?;
    let text = match args.format {
        None => format!("seed={} deep={} samples={}\n{}", opts.seed, opts.deep, opts.samples, render_table(&checks)),
        Some(Format::Json) => output::json(&serde_json::json!({
            "seed": opts.seed,
            "deep": opts.deep,
            "samples": opts.samples,
            "checks": checks,
        }))?,
        Some(Format::Csv) => output::checks_csv(&opts, &checks)?,
    };
    emit(&args.output, &text)?;
    if checks.iter().all(|c| c.pass) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}
