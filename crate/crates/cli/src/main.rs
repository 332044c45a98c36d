//! `fracmix`: forward runs, synthetic observations, order recovery and checks.

mod commands;
mod config;
mod exit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use exit::Failure;

#[derive(Debug, Parser)]
#[command(name = "fracmix", version, about = "Mixed subdiffusion / fractional-wave forward and inverse solver")]
struct Cli {
    /// Experiment configuration (JSON); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Fractional orders as `ALPHA,BETA`.
    #[arg(long, global = true, value_parser = parse_orders, default_value = "0.7,1.5")]
    orders: (f64, f64),
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Reserved; every command is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the forward problem and write solution and mode CSVs.
    Forward {
        /// Spatial points per axis, boundary included.
        #[arg(long, default_value_t = 65)]
        grid_points: usize,
    },
    /// Write the observations the given orders would produce.
    Observe {
        #[arg(long)]
        swapped: bool,
    },
    /// Recover the orders from an observation file.
    Invert {
        #[arg(long)]
        observation: PathBuf,
    },
    /// Run the positivity, monotonicity and residual checks.
    Verify,
    /// Evaluate `E_{rho,mu}(x)`.
    MlEval {
        rho: f64,
        mu: f64,
        #[arg(allow_hyphen_values = true)]
        x: f64,
    },
}

fn parse_orders(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected ALPHA,BETA")?;
    let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Command::MlEval { rho, mu, x } = cli.command {
        return commands::ml_eval(rho, mu, x);
    }
    let cfg = ExperimentConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Forward { grid_points } => commands::forward(&cfg, cli.orders, grid_points, &cli.out),
        Command::Observe { swapped } => commands::observe_cmd(&cfg, cli.orders, swapped, &cli.out),
        Command::Invert { observation } => commands::invert(&cfg, &observation, &cli.out),
        Command::Verify => commands::verify(&cfg, cli.orders),
        Command::MlEval { .. } => unreachable!(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FRACMIX_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
