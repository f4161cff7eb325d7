//! `decolemma`: decides whether a discrete-spectrum system decoheres by
//! bounding its destructive-interference phase sums, and emits the curves,
//! certificates and pairing dumps behind the decision.

mod commands;
mod io;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "decolemma",
    version,
    about = "Decoherence analysis for discrete-spectrum quantum models",
    long_about = "Evaluates the phase sum R_D(t) = (1/N) sum_j f(j/N) e^{i(j/N)t}, searches \
                  for a quasi-continuous decomposition of the sampled function, and decides \
                  whether the sum stays below its predicted bound over the window \
                  [kappa*pi, pi*P]. Exit codes: 0 success/decoheres, 2 input error, \
                  3 no-decoherence, 4 inconclusive."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the phase sum R_D(t) over a time range, emitting CSV
    Sum(commands::SumArgs),
    /// Decompose a sampled function and issue the decoherence verdict
    Analyze(commands::AnalyzeArgs),
    /// Dump the half-period cancellation pairing at a fixed time
    Pairs(commands::PairsArgs),
    /// Analyze a density-matrix model; optionally evolve it by brute force
    Model(commands::ModelArgs),
    /// Batch transform sweep (canonical grid or explicit time range)
    Dft(commands::DftArgs),
}

/// `DECOLEMMA_THREADS` caps internal parallelism.
fn init_thread_pool() -> Result<(), String> {
    let Ok(raw) = std::env::var("DECOLEMMA_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("invalid DECOLEMMA_THREADS value '{raw}'"))?;
    if threads == 0 {
        return Err("DECOLEMMA_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() {
    if let Err(message) = init_thread_pool() {
        eprintln!("decolemma: {message}");
        std::process::exit(commands::EXIT_INPUT);
    }
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sum(args) => commands::cmd_sum(args),
        Command::Analyze(args) => commands::cmd_analyze(args),
        Command::Pairs(args) => commands::cmd_pairs(args),
        Command::Model(args) => commands::cmd_model(args),
        Command::Dft(args) => commands::cmd_dft(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(error) => {
            eprintln!("decolemma: {error}");
            std::process::exit(commands::EXIT_INPUT);
        }
    }
}
