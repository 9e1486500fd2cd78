//! Subspace-identification toolchain for multi-channel thermal data.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

use clap::{Parser, Subcommand};

use pbsid_cli::commands::{identify, preprocess, residuals, simulate};

#[derive(Parser)]
#[command(
    name = "pbsid",
    version,
    about = "Predictor-based subspace identification for multi-channel thermal systems",
    after_help = "Thread count can be capped with the PBSID_THREADS environment variable."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic heat-rod identification/validation datasets.
    Simulate(simulate::SimulateArgs),
    /// Estimate a state-space model from identification data.
    Identify(identify::IdentifyArgs),
    /// Residual autocorrelation and whiteness test for a saved model.
    Residuals(residuals::ResidualArgs),
    /// Filter, detrend, decimate and analyze a raw dataset.
    Preprocess(preprocess::PreprocessArgs),
}

const EXIT_DATA: i32 = 3;
const EXIT_NUMERICAL: i32 = 4;

fn exit_code_for(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<pbsid::Error>() {
        Some(pbsid::Error::ExcitationDeficient { .. }) | Some(pbsid::Error::Numerical(_)) => {
            EXIT_NUMERICAL
        }
        _ => EXIT_DATA,
    }
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("PBSID_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
            }
        }
    }
}

fn main() {
    init_thread_pool();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => simulate::run(args),
        Command::Identify(args) => identify::run(args),
        Command::Residuals(args) => residuals::run(args),
        Command::Preprocess(args) => preprocess::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code_for(&err));
    }
}
