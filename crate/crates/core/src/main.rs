use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fourier_learn::cli::{self, AlphaSource};

#[derive(Parser)]
#[command(name = "fourier-learn", version, about = "Kernel learning from Fourier peaks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a kernel and linear SVM; writes model, measure, trace, metrics.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override dataset and diffusion seeds.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare against RBF random features at several feature budgets.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated even feature counts, e.g. 100,500,1000.
        #[arg(long, value_delimiter = ',')]
        budgets: Vec<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Export the Fourier potential over a 2-d frequency grid.
    Landscape {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Grid extent and resolution as lo:hi:steps (both axes).
        #[arg(long)]
        grid: String,
        /// "uniform" or a path to a trained model file.
        #[arg(long, default_value = "uniform")]
        alpha_source: String,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train { config, out, seed } => cli::cmd_train(&config, &out, seed),
        Command::Compare {
            config,
            out,
            budgets,
            seed,
        } => cli::cmd_compare(&config, &out, &budgets, seed),
        Command::Landscape {
            config,
            out,
            grid,
            alpha_source,
            seed,
        } => {
            let source = if alpha_source == "uniform" {
                AlphaSource::Uniform
            } else {
                AlphaSource::ModelFile(PathBuf::from(alpha_source))
            };
            cli::cmd_landscape(&config, &out, &grid, &source, seed)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
