use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand};

use gardner_espline_cli::{commands, tables};

/// Exponential cubic B-spline collocation runner for the Gardner equation.
#[derive(Parser)]
#[command(name = "gardner-espline", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one experiment described by a config file
    Run {
        /// Path to the `key = value` configuration file
        config: PathBuf,
    },
    /// Regenerate one benchmark table as CSV
    Table {
        /// Table id: T2, T3, T4, T5, or T6
        id: String,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank basis shape parameters by the error norm at the final time
    Scan {
        /// Path to the `key = value` configuration file
        config: PathBuf,
        /// Smallest shape parameter of the grid (> 0)
        #[arg(long)]
        zeta_min: f64,
        /// Largest shape parameter of the grid
        #[arg(long)]
        zeta_max: f64,
        /// Number of grid points
        #[arg(long, default_value_t = 40)]
        points: usize,
        /// Space the grid uniformly in the exponent instead of linearly
        #[arg(long)]
        log_spaced: bool,
    },
    /// Sample the von Neumann amplification factors over [0, pi]
    Stability {
        /// Path to the `key = value` configuration file
        config: PathBuf,
        /// Frozen nonlinear factor; default: max |U + U^2| of the initial data
        #[arg(long)]
        epsilon: Option<f64>,
        /// Number of phase intervals (writes `phases + 1` samples)
        #[arg(long, default_value_t = 256)]
        phases: usize,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            process::exit(code);
        }
    };

    let result = match cli.command {
        Command::Run { config } => commands::cmd_run(&config),
        Command::Table { id, out } => tables::run_table(&id, &out),
        Command::Scan {
            config,
            zeta_min,
            zeta_max,
            points,
            log_spaced,
        } => commands::cmd_scan(&config, zeta_min, zeta_max, points, log_spaced),
        Command::Stability {
            config,
            epsilon,
            phases,
        } => commands::cmd_stability(&config, epsilon, phases),
    };

    if let Err(e) = result {
        eprintln!("error: {e}");
        process::exit(e.exit_code());
    }
}
