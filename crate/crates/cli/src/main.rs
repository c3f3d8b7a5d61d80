//! `birkhoff` command-line front end. Every command writes one JSON document
//! carrying a `meta` block with the seed, tool version and parameters.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use birkhoff::Kind;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Runtime(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl From<birkhoff::Error> for CliError {
    fn from(e: birkhoff::Error) -> Self {
        use birkhoff::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::DimensionMismatch(_)
            | E::Parse(_)
            | E::TooLarge(_)
            | E::NotLatin(_)
            | E::Precondition(_) => CliError::Invalid(e.to_string()),
            E::NotMember(_) | E::NoPerfectMatching | E::ConstructionFailed(_) => CliError::Runtime(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "birkhoff", version, about = "Exact tools for vertices of stochastic-array polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Random seed (also read from SEED)
    #[arg(long, env = "SEED", default_value_t = 0)]
    seed: u64,
    /// Write the JSON result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether an array is a vertex
    Verify {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = VerifyMethod::Both)]
        method: VerifyMethod,
        #[command(flatten)]
        common: Common,
    },
    /// List all vertices of a tiny polytope
    Enumerate {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Build certified non-trivial vertices
    Construct {
        #[arg(value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Latin squares and Hamiltonian double Latin squares
    Designs {
        #[command(subcommand)]
        design: DesignCommand,
    },
    /// Permanents and counting bounds
    Bounds {
        #[command(subcommand)]
        bound: BoundsCommand,
    },
    /// Maximize random objectives and report support sizes
    Sample {
        #[arg(long, value_enum, default_value_t = KindArg::Omega)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
enum DesignCommand {
    /// Random Latin square of order t
    Latin {
        #[arg(long)]
        t: usize,
        /// Also count all Latin squares of order t (t <= 5)
        #[arg(long)]
        count: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Random Hamiltonian double Latin square of even order n
    DoubleLatin {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
enum BoundsCommand {
    /// Exact permanent of a square matrix with the applicable bounds
    Permanent {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Log-scale count estimates for the construction
    Report {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum VerifyMethod {
    Graph,
    Rank,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum KindArg {
    Omega,
    Sigma,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Omega => Kind::Omega,
            KindArg::Sigma => Kind::Sigma,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand => 4,
                ErrorKind::MissingSubcommand | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 4,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
