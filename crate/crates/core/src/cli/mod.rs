//! Command-line front end: config loading, dispatch, report emission.

pub mod commands;
pub mod config;
pub mod corpus;
pub mod report;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use config::ExperimentConfig;
use report::{write_atomic, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    /// Wrap a library error with the command name.
    pub fn from_lib(command: &str, e: Error) -> Self {
        match e {
            Error::InvalidInput(_) => CliError::Usage(format!("{command}: {e}")),
            _ => CliError::Numeric(format!("{command}: {e}")),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "molab", version, about = "Campanato-type seminorms under Musielak-Orlicz growth")]
pub struct Cli {
    /// Experiment config (JSON). Defaults to [-1,1], res 1024, power(1).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Input function as grid CSV.
    #[arg(long, global = true)]
    pub function: Option<PathBuf>,
    /// Built-in input function, e.g. `log_abs` or `abs_power(0.5)`.
    #[arg(long, global = true)]
    pub corpus: Option<String>,
    /// Output directory for JSON, CSV and SVG files.
    #[arg(long, global = true, default_value = "molab-out")]
    pub out: PathBuf,
    /// Worker threads (overrides MOLAB_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Record wall time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CampanatoArgs {
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Exp,
    Power,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Luxembourg norm of the input, or of χ_B with --ball.
    Lux {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        ball: Option<Vec<f64>>,
    },
    /// Minimal polynomial projection on a ball.
    Proj {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        ball: Option<Vec<f64>>,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Campanato seminorm variants over the ball family.
    Campanato(CampanatoArgs),
    /// Variant ratios, bracket flags and a per-ball scatter plot.
    Equiv(CampanatoArgs),
    /// John-Nirenberg distribution and decay fit.
    Jn {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        ball: Option<Vec<f64>>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
    },
    /// Sampled uniform Muckenhoupt constants.
    Aq {
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<f64>>,
        /// Also estimate the critical indices.
        #[arg(long)]
        indices: bool,
    },
    /// Atom construction, validation and pairing.
    Atoms {
        #[command(subcommand)]
        action: AtomsCommand,
    },
    /// Square-transform Carleson norm.
    Carleson {
        #[arg(long)]
        s: Option<usize>,
        /// Run even when the growth function is not in the A1 range.
        #[arg(long)]
        force: bool,
    },
    /// Acceptance battery.
    Suite {
        #[arg(long)]
        quick: bool,
        /// Skip the thread-budget determinism check.
        #[arg(long)]
        no_determinism: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum AtomsCommand {
    /// Build an atom from the input profile.
    Make {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        ball: Option<Vec<f64>>,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long)]
        s: Option<usize>,
        /// File stem for the CSV and JSON sidecar.
        #[arg(long, default_value = "atom")]
        name: String,
    },
    /// Re-check a stored atom.
    Validate {
        #[arg(long)]
        atom: PathBuf,
    },
    /// Pair a stored atom with the input function.
    Pair {
        #[arg(long)]
        atom: PathBuf,
        #[arg(long)]
        s: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Lux { .. } => "lux",
            Command::Proj { .. } => "proj",
            Command::Campanato(_) => "campanato",
            Command::Equiv(_) => "equiv",
            Command::Jn { .. } => "jn",
            Command::Aq { .. } => "aq",
            Command::Atoms { action: AtomsCommand::Make { .. } } => "atoms-make",
            Command::Atoms { action: AtomsCommand::Validate { .. } } => "atoms-validate",
            Command::Atoms { action: AtomsCommand::Pair { .. } } => "atoms-pair",
            Command::Carleson { .. } => "carleson",
            Command::Suite { .. } => "suite",
        }
    }
}

/// `--threads`, then `MOLAB_THREADS`, then the rayon default (0).
pub fn thread_budget(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var("MOLAB_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("MOLAB_THREADS must be a thread count, got '{v}'"))),
        Err(_) => Ok(0),
    }
}

/// Run a parsed command: returns the report after writing it under `--out`.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p).map_err(CliError::Usage)?,
        None => ExperimentConfig::default(),
    };
    let threads = thread_budget(cli.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let mut report = pool.install(|| commands::dispatch(cli, cfg))?;
    if cli.timing {
        report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    let path = cli.out.join(format!("{}.json", report.command));
    write_atomic(&path, report.to_json().as_bytes())
        .map_err(|e| CliError::Numeric(format!("writing {}: {e}", path.display())))?;
    Ok(report)
}

/// Parse `args`, run, print the report, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            print!("{}", report.to_json());
            let failed = report.results.get("passed").and_then(|p| p.as_u64()).zip(
                report.results.get("total").and_then(|t| t.as_u64()),
            );
            match failed {
                Some((p, t)) if p < t => EXIT_NUMERIC,
                _ => EXIT_OK,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
