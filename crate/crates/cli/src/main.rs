//! `teqkd`: rate curves, Shannon limits, code simulations and the
//! reconciliation demo, written as CSV.

// `!(x > 0.0)` guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod grid;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grid::{SnrGrid, UsizeList};
use std::path::PathBuf;
use std::process::ExitCode;
use teqkd::Error;

#[derive(Debug, Parser)]
#[command(name = "teqkd", version = output::VERSION, about = "Time-entanglement QKD channel rates and reconciliation codes")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for every random stream. Reconciliation peers must share it, as
    /// both ends simulate the same channel draws.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Output file; standard output if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

/// SNR axis of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    /// `gamma = 1/sigma^2`, bin width one.
    Gamma,
    /// `gamma_bar = N^2 gamma`, frame width one.
    GammaBar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MiMode {
    Hard,
    Soft,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AppMode {
    Exact,
    Simplified,
    Hard,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symbol error rate: closed form against Monte Carlo.
    PeCurve {
        #[arg(long, default_value = "2,4,8,16")]
        n_bins: UsizeList,
        #[arg(long, default_value = "10:40:1")]
        snr: SnrGrid,
        #[arg(long, value_enum, default_value_t = Axis::Gamma)]
        axis: Axis,
        /// Error events per Monte Carlo point.
        #[arg(long, default_value_t = 200)]
        events: u64,
        /// Emitted pairs per point before the estimate is reported as is.
        #[arg(long, default_value_t = 1 << 30)]
        max_trials: u64,
    },
    /// Mutual information, hard and soft output, with approximations.
    MiCurve {
        #[arg(long, default_value = "4,8,16")]
        n_bins: UsizeList,
        #[arg(long, value_enum, default_value_t = MiMode::Both)]
        mode: MiMode,
        #[arg(long, default_value = "0:45:1")]
        snr: SnrGrid,
        #[arg(long, value_enum, default_value_t = Axis::Gamma)]
        axis: Axis,
    },
    /// Shannon limits per (N, code rate) row.
    Limits {
        /// Rows as `N:k/n`, comma separated.
        #[arg(long, default_value = "8:2/3,16:3/4,32:3/5,32:4/5,64:2/3,64:5/6")]
        rows: String,
        /// Bisection tolerance in dB.
        #[arg(long, default_value_t = 0.005)]
        tol_db: f64,
        /// Backoff operating points, in bits below the unit-frame capacity.
        #[arg(long, default_value = "1,2")]
        backoff: UsizeList,
    },
    /// Monte Carlo BER of a reconciliation code.
    SimulateCode {
        /// Code id such as rs-63-43, bch-511-378-13 or ldpc-384-3-9-s1.
        #[arg(long, conflicts_with = "code_file")]
        code: Option<String>,
        /// TOML code descriptor.
        #[arg(long)]
        code_file: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        n_bins: usize,
        #[arg(long, default_value = "20:40:1")]
        snr: SnrGrid,
        /// Blocks with residual errors per point.
        #[arg(long, default_value_t = 200)]
        events: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_blocks: u64,
        /// Bit posteriors for LDPC decoding.
        #[arg(long, value_enum, default_value_t = AppMode::Exact)]
        app: AppMode,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
    },
    /// Union bound on the post-decoding BER of RS or BCH codes.
    Bound {
        #[arg(long, default_value = "rs-63-43")]
        code: String,
        #[arg(long, default_value_t = 8)]
        n_bins: usize,
        #[arg(long, default_value = "10:60:0.5")]
        snr: SnrGrid,
        /// BCH only: charge two bit errors to every wrong photon block.
        #[arg(long)]
        two_bit_blocks: bool,
    },
    /// Bob: accept reconciliation sessions.
    ReconcileServe {
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
        /// Sessions to accept before exiting; unlimited if absent.
        #[arg(long)]
        sessions: Option<usize>,
        #[arg(long, value_enum, default_value_t = AppMode::Exact)]
        app: AppMode,
        #[arg(long, default_value_t = 10_000)]
        timeout_ms: u64,
    },
    /// Alice: stream syndromes to a server.
    ReconcileConnect {
        #[arg(long, default_value = "127.0.0.1:7878")]
        connect: String,
        #[arg(long, default_value = "rs-63-43")]
        code: String,
        #[arg(long, default_value_t = 8)]
        n_bins: usize,
        /// Channel SNR `gamma` in dB.
        #[arg(long, default_value_t = 35.0)]
        snr_db: f64,
        #[arg(long, default_value_t = 100)]
        blocks: u32,
        /// Session nonce as 16 hex digits; pass a previous nonce to resume.
        #[arg(long)]
        nonce: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        timeout_ms: u64,
    },
}

/// Exit status for a library error.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) => 2,
        Error::NonConvergence { .. } | Error::NoBracket(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let threads = cli.global.workers.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {threads} workers: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| commands::run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
