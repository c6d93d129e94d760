mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sierpdist::{Error, DEFAULT_BUDGET};

/// Exact distances, eccentricities, diameter and radius in generalized
/// Sierpiński graphs S(G,t).
#[derive(Debug, Parser)]
#[command(name = "sierpdist", version)]
pub struct Cli {
    /// Base graph edge list ("n m" header, then one "u v" pair per line).
    #[arg(long, global = true)]
    graph: Option<PathBuf>,

    /// Level t (word length).
    #[arg(short = 't', global = true)]
    level: Option<usize>,

    /// Largest explicit S(G,t) the oracle may build, in vertices.
    #[arg(long, global = true, env = "SIERPDIST_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,

    /// Let `dist` build S(G,t) when no formula applies.
    #[arg(long, global = true)]
    fallback: bool,

    /// Vouch for the long-path premiss of the conditional formula.
    #[arg(long, global = true)]
    assert_premiss_b: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Machine)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance between two words, e.g. `dist 3,0,1 1,3,2`.
    Dist { a: String, b: String },
    /// Diameter of S(G,t).
    Diameter,
    /// Radius of S(G,t).
    Radius,
    /// Eccentricity of an extreme vertex (`--extreme`) or of a word.
    Ecc {
        #[arg(long, conflicts_with = "word")]
        extreme: Option<usize>,
        #[arg(required_unless_present = "extreme")]
        word: Option<String>,
    },
    /// Compare every formula with BFS over all pairs, levels 1..=t-max.
    Verify {
        #[arg(long)]
        t_max: usize,
        /// Extra pair to print formula and oracle values for, as `A:B`.
        #[arg(long)]
        probe: Vec<String>,
    },
    /// Time recursive queries at level t, and the oracle when within budget.
    Bench {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write S(G,t) as Graphviz DOT.
    ExportDot {
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn mismatch(message: impl Into<String>) -> Self {
        Self {
            code: 5,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::InvalidWord(_)
            | Error::LengthMismatch { .. }
            | Error::VertexOutOfRange { .. }
            | Error::Unreachable { .. }
            | Error::IdenticalEndpoints(_)
            | Error::NotAPath(_) => 2,
            Error::NotApplicable(_) | Error::Overflow { .. } => 3,
            Error::BudgetExceeded { .. } | Error::SearchLimit { .. } => 4,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
