mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Failure;

#[derive(Parser, Debug)]
#[command(name = "incompat", version, about = "Incompatibility robustness of quantum measurements, channels and instruments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Solver stopping tolerance.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long = "max-iter", default_value_t = 200_000)]
    max_iter: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a POVM, channel or instrument file.
    Validate {
        path: PathBuf,
        /// Validation tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Generalized incompatibility robustness of a pair.
    Robustness {
        #[arg(value_enum)]
        kind: PairKind,
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the optimal joint and noise here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Run the theorem suite and print the pass/fail table.
    Theorems {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Read the suite's input files from this directory instead of the bundled copies.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Build an object and write it as JSON.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PairKind {
    Measurements,
    Channels,
    Instruments,
}

#[derive(Subcommand, Debug)]
enum ConstructKind {
    /// Lüders instrument `ρ ↦ √A ρ √A` of a POVM.
    Lueders {
        povm: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure-and-prepare with `|x⟩⟨x|` as output states.
    SpecialMp {
        povm: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure-and-prepare with the states listed in a file.
    Mp {
        povm: PathBuf,
        states: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trash-and-prepare `ρ ↦ tr(ρ) p_x η_x`.
    TrashPrep {
        states: PathBuf,
        #[arg(long = "dim-in")]
        dim_in: usize,
        /// Comma-separated probabilities, one per state.
        #[arg(long, value_delimiter = ',')]
        probs: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One-outcome identity instrument.
    Identity {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fine-grain every operation into Kraus-rank-one pieces.
    Detailed {
        instrument: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Projective dilation of a POVM; the projectors are written, the unitary reported.
    Naimark {
        povm: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compatible pair of indecomposable instruments from a joint POVM.
    IndecompPair {
        joint: PathBuf,
        /// Outcome grid of the joint POVM, e.g. `2x2`.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Joint of the pair mixed half and half with trash-and-prepare noise.
    UpperBoundJoint {
        first: PathBuf,
        second: PathBuf,
        /// File listing the two noise states.
        states: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Instruments that are traditionally but not parallel compatible with themselves.
    PidExample {
        #[arg(long, default_value_t = 2)]
        outcomes: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
