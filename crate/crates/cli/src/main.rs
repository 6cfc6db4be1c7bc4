mod run;
mod verify;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Time-dependent route planning on a customizable multi-level overlay.
#[derive(Parser, Debug)]
#[command(name = "tdcrp", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Road network (`tdgr`).
    #[arg(long, global = true, env = "TDCRP_NETWORK")]
    pub network: Option<PathBuf>,
    /// Multi-level partition (`mlp`).
    #[arg(long, global = true, env = "TDCRP_PARTITION")]
    pub partition: Option<PathBuf>,
    /// Binary engine snapshot.
    #[arg(long, global = true, env = "TDCRP_SNAPSHOT")]
    pub snapshot: Option<PathBuf>,
    /// Cell size exponents per level: 4,8,12 means cells of at most 2^4, 2^8, 2^12 vertices.
    #[arg(long, global = true, env = "TDCRP_LEVELS", value_delimiter = ',', default_value = "4,8,12")]
    pub levels: Vec<u32>,
    /// Approximation error per level, or a single value for all levels.
    #[arg(long, global = true, env = "TDCRP_EPS", value_delimiter = ',', default_value = "0")]
    pub eps: Vec<f64>,
    /// Query batch (`q <s> <t> <tau_ms>` per line); random queries otherwise.
    #[arg(long, global = true, env = "TDCRP_QUERIES")]
    pub queries: Option<PathBuf>,
    /// Live-traffic update batch (`tdu`).
    #[arg(long, global = true, env = "TDCRP_UPDATES")]
    pub updates: Option<PathBuf>,
    #[arg(long, global = true, env = "TDCRP_SEED", default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, env = "TDCRP_WORKERS", default_value_t = 1)]
    pub workers: usize,
    /// Directory for CSV outputs; CSVs always go to stdout as well.
    #[arg(long, global = true, env = "TDCRP_OUT")]
    pub out: Option<PathBuf>,
    /// Write zeros instead of wall-clock times, for byte-identical reruns.
    #[arg(long, global = true, env = "TDCRP_NO_TIMINGS")]
    pub no_timings: bool,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    #[arg(long, default_value_t = 100)]
    pub width: usize,
    #[arg(long, default_value_t = 100)]
    pub height: usize,
    /// Share of time-dependent arcs.
    #[arg(long, default_value_t = 0.275)]
    pub td_fraction: f64,
    /// Breakpoints per time-dependent arc.
    #[arg(long, default_value_t = 13)]
    pub breakpoints: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a synthetic grid network to --network.
    Generate(GridArgs),
    /// Partition --network into nested cells and write --partition.
    Partition,
    /// Customize the overlay; writes --snapshot and per-level statistics.
    Customize,
    /// Run earliest-arrival queries on --snapshot.
    Query {
        /// Number of random queries when no --queries file is given.
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        /// Compare every answer with time-dependent Dijkstra.
        #[arg(long)]
        oracle: bool,
    },
    /// Apply --updates to --snapshot in place and report what changed.
    Update,
    /// Check the engine against its oracles; nonzero exit on any mismatch.
    Verify {
        #[command(flatten)]
        grid: GridArgs,
        /// Random queries per check.
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Random update batches to check in exact mode.
        #[arg(long, default_value_t = 3)]
        update_batches: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

pub(crate) type Outcome = Result<bool>;
