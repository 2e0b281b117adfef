use std::path::PathBuf;
use std::process::ExitCode;

use abel_core::problem::ProblemConfig;
use abel_core::report::{run_compare, run_count, run_expand, run_solve, Format, RunSummary};
use abel_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Series solutions of ẋ = Σ c_i(t) x^i via the shuffle algebra.
#[derive(Debug, Parser)]
#[command(name = "abel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the symbolic series Z up to order K.
    Expand(Common),
    /// Evaluate the truncated solution on the grid, with bound and RK4 reference.
    Solve(Common),
    /// Write tree, word-norm, partition and M0 counts for k = 0..K.
    Count(Common),
    /// Compare the expansion with Chen-Fliess and RK4, including integral counts.
    Compare(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Problem config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the truncation order K.
    #[arg(long)]
    order: Option<usize>,
    /// Override the number of grid points N.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_GUARD: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::GuardExceeded { .. } | Error::WordTooLong { .. } => EXIT_GUARD,
        Error::BlowUp { .. } | Error::ConstantTerm(_) | Error::NotHomogeneous { .. } => EXIT_NUMERICAL,
        Error::LetterOutOfRange { .. }
        | Error::AlphabetTooLarge(_)
        | Error::Parse(_)
        | Error::Grid(_)
        | Error::AlphabetMismatch { .. }
        | Error::Config(_)
        | Error::Io(_)
        | Error::Csv(_)
        | Error::Json(_) => EXIT_CONFIG,
    }
}

fn load(common: &Common) -> abel_core::Result<ProblemConfig> {
    let mut cfg = ProblemConfig::load(&common.config)?;
    if let Some(k) = common.order {
        cfg.order = k;
    }
    if let Some(n) = common.grid {
        cfg.points = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> abel_core::Result<RunSummary> {
    let (common, runner): (&Common, fn(&ProblemConfig, &std::path::Path, Format) -> _) =
        match &cli.command {
            Command::Expand(c) => (c, run_expand),
            Command::Solve(c) => (c, run_solve),
            Command::Count(c) => (c, run_count),
            Command::Compare(c) => (c, run_compare),
        };
    let cfg = load(common)?;
    runner(&cfg, &common.out, common.format.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(summary) => {
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            for f in &summary.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
