//! `powercast`: solvers, simulators and generators for energy-constrained
//! information exchange. Results go to stdout as JSON, diagnostics to stderr.
//!
//! Exit codes: 0 success, 1 infeasible or failed verification, 2 usage or parse error.

mod bench;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use powercast::Scalar;

#[derive(Parser)]
#[command(name = "powercast", version, about = "Energy-constrained convergecast and broadcast")]
pub struct Cli {
    /// Also render every exact scalar as a decimal with this many digits.
    #[arg(long, global = true, value_name = "K")]
    pub decimal: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    #[value(alias = "convergecast")]
    Conv,
    #[value(alias = "broadcast")]
    Bcast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    UnknownTree,
    DistBroadcast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    OracleEquivalence,
    DistributedBounds,
    Scaling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
pub enum Command {
    /// Optimal convergecast power on a line.
    LineConvergecast {
        file: PathBuf,
        /// Include the optimal strategy as timed moves.
        #[arg(long)]
        strategy: bool,
    },
    /// Optimal broadcast power on a line from agent K.
    LineBroadcast {
        file: PathBuf,
        /// Source agent; defaults to the source recorded in the file.
        #[arg(long)]
        source: Option<usize>,
        #[arg(long)]
        strategy: bool,
    },
    /// Decides feasibility on a line at a given power.
    Decide {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        power: Scalar,
        #[arg(long)]
        source: Option<usize>,
    },
    /// Separation-based strategies on a known graph.
    GraphApprox {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        source: Option<usize>,
        #[arg(long)]
        strategy: bool,
    },
    /// Runs a distributed algorithm on a tree.
    Simulate {
        /// Tree instance (also accepted as `--tree`).
        #[arg(required_unless_present = "tree")]
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        tree: Option<PathBuf>,
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        /// Power of every agent; defaults to the separation (twice it for broadcast).
        #[arg(long)]
        budget: Option<Scalar>,
        #[arg(long)]
        source: Option<usize>,
        /// Include the event log.
        #[arg(long)]
        trace: bool,
    },
    /// Replays a strategy file and checks the goal and the budget.
    Verify {
        file: PathBuf,
        #[arg(long = "strategy", value_name = "S")]
        strategy_file: PathBuf,
        #[arg(long)]
        budget: Scalar,
        #[arg(long, value_enum, default_value = "conv")]
        mode: Mode,
        #[arg(long)]
        source: Option<usize>,
        /// Include the full meeting trace.
        #[arg(long)]
        trace: bool,
    },
    /// Instance generators.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Property and scaling sweeps.
    Bench(BenchArgs),
}

#[derive(Subcommand)]
pub enum GenCommand {
    /// Random line with rational gaps.
    Line {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random tree with agents at the leaves.
    Tree {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Probability that an inner node also hosts an agent.
        #[arg(long, default_value_t = 0.0)]
        inner_agents: f64,
    },
    /// Reduction star from a 3-partition multiset.
    Star {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Comma-separated multiset of 3m positive integers.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u64>,
    },
    /// Lower-bound line for distributed convergecast.
    LowerBound {
        #[arg(long)]
        delta: Scalar,
        #[arg(long)]
        power: Scalar,
    },
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Number of seeded instances for the property suites.
    #[arg(long)]
    pub seeds: Option<u64>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Instance sizes for the scaling suite.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli, &argv) {
        Ok(out) => {
            out.emit(cli.decimal);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
