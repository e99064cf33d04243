//! `geomlaw`: run simulations from JSON experiment files.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 runtime error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geomlaw::Error;

#[derive(Parser, Debug)]
#[command(name = "geomlaw", version, about = "Laws of large numbers for geometric functionals, by simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON experiment file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the config file.
    #[arg(long, env = "GEOMLAW_SEED", value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0, value_name = "N")]
    pub threads: usize,
    /// Output file (sample, graph) or directory (everything else); standard
    /// output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub format: OutFormat,
    /// Write a header line on point CSV output.
    #[arg(long)]
    pub header: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindArg {
    Mst,
    Knn,
    Delaunay,
    Voronoi,
    Sig,
    Gabriel,
    Rng,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a binomial point process (optionally marked).
    Sample {
        #[command(flatten)]
        common: Common,
        /// Number of points; overrides the config.
        #[arg(long)]
        n: Option<usize>,
        /// Uniform density on the unit cube of this dimension, without a config.
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Build a geometric graph and write its edge list.
    Graph {
        #[command(flatten)]
        common: Common,
        /// Graph family; overrides the config.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        directed: bool,
        /// Point CSV to read instead of sampling.
        #[arg(long = "in", value_name = "PATH")]
        input: Option<PathBuf>,
    },
    /// Evaluate a functional on one sample.
    Functional {
        #[command(flatten)]
        common: Common,
        /// Point CSV to read instead of sampling.
        #[arg(long = "in", value_name = "PATH")]
        input: Option<PathBuf>,
    },
    /// Estimate E[ξ_∞(P_τ)] (and the limit integral, if configured).
    Limit {
        #[command(flatten)]
        common: Common,
    },
    /// Finite-n convergence table.
    Converge {
        #[command(flatten)]
        common: Common,
    },
    /// Coupling match probabilities.
    Couple {
        #[command(flatten)]
        common: Common,
    },
    /// Boolean model statistics of one sample.
    Boolean {
        #[command(flatten)]
        common: Common,
    },
    /// On-line packing fractions.
    Pack {
        #[command(flatten)]
        common: Common,
    },
    /// Check an experiment file and print its normalized form.
    Validate {
        /// Experiment file (same as --config).
        path: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// Print the JSON schema of experiment files instead.
        #[arg(long)]
        schema: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. }
        | Error::InvalidArgument(_)
        | Error::InvalidWeight(_)
        | Error::InvalidDensity(_)
        | Error::Json(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        // the reader went away (`geomlaw ... | head`); nothing left to say
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
