//! `cvqudit`: generator dumps, invariant checks, the squeezing sweep of the
//! qutrit Bell value, squeezed-vacuum to qudit mapping reports and CHSH
//! evaluation.
//!
//! Exit status: 0 success, 1 invariant or numerical failure, 2 usage error,
//! 3 I/O error. Diagnostics go to standard error.

mod chsh;
mod gens;
mod map_nopa;
mod output;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "cvqudit",
    version,
    about = "Map truncated continuous-variable states onto qudits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump SU(n) generators (optionally block-embedded in N levels) as JSON.
    Gens(gens::GensArgs),
    /// Run the algebra, embedding and Bloch-map invariant suites.
    Verify(verify::VerifyArgs),
    /// Tabulate the qutrit Bell value B(r) of the squeezed vacuum.
    Sweep(sweep::SweepArgs),
    /// Map a squeezed vacuum onto two qudits and report the induced state.
    MapNopa(map_nopa::MapNopaArgs),
    /// Evaluate the lifted CHSH operator on a squeezed vacuum or block mixture.
    Chsh(chsh::ChshArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) | CliError::Io(m) => m,
        }
    }
}

impl From<cvqudit::Error> for CliError {
    fn from(e: cvqudit::Error) -> Self {
        match e {
            cvqudit::Error::Numerical(_) => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gens(args) => gens::run(&args),
        Command::Verify(args) => verify::run(&args),
        Command::Sweep(args) => sweep::run(&args),
        Command::MapNopa(args) => map_nopa::run(&args),
        Command::Chsh(args) => chsh::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
