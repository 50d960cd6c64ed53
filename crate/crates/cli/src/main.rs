//! `scattered`: experiments on ψ^(k), linear sets and MRD codes from the shell.
//!
//! Exit codes: 0 when the command ran (whatever the verdict), 2 for invalid
//! configuration, 3 when a search would exceed its budget.

mod commands;
mod family;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scattered_core::linear_sets::EquivalenceMethod;
use scattered_core::Error;

#[derive(Parser, Debug)]
#[command(name = "scattered", version, about = "Scattered polynomials, linear sets and MRD codes over GF(q^{2t})")]
pub struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Odd prime characteristic.
    #[arg(long)]
    pub p: u64,
    /// q = p^e.
    #[arg(long, default_value_t = 1)]
    pub e: u32,
    /// n = 2t.
    #[arg(long)]
    pub t: u32,
    /// Monic irreducible modulus of degree e·2t over GF(p), little-endian,
    /// as a JSON array or whitespace/comma separated integers.
    #[arg(long)]
    pub modulus_file: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
pub struct PolyArgs {
    /// ψ^(k).
    #[arg(long, conflicts_with = "family")]
    pub k: Option<usize>,
    /// Any family spec, e.g. u2:1,w^5.
    #[arg(long)]
    pub family: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    LinearSolve,
    Sweep,
}

impl From<Method> for EquivalenceMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::LinearSolve => EquivalenceMethod::LinearSolve,
            Method::Sweep => EquivalenceMethod::Sweep,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run both scatteredness checkers and compare with the characterization.
    VerifyScattered {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        poly: PolyArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Non-scatteredness witnesses (ρ, x) for ψ^(k).
    Witness {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Intersection of L_{ψ^(k)} with the subline over GF(q^t).
    BaerCheck {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Parameters, rank distribution and idealisers of C_f.
    CodeReport {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        poly: PolyArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// ΓL(2, q^n)-equivalence of U_left with each subspace U_right denotes.
    Equiv {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Candidates examined per automorphism before giving up.
        #[arg(long, default_value_t = 100_000_000)]
        budget: u128,
        #[arg(long, value_enum, default_value_t = Method::LinearSolve)]
        method: Method,
        /// Search GL(2, q^n) only.
        #[arg(long)]
        no_automorphisms: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Γ_k, its σ-intersections, intersection numbers and the projection.
    Geometry {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the acceptance criteria.
    Acceptance {
        /// Criterion ids or keys, comma separated.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Fields for the characterization sweep as p:t or p:e:t, comma separated.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<String>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(s) => write!(f, "{s}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::BudgetExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
