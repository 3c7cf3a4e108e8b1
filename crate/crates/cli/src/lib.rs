//! Command-line front end for the exponential cubic B-spline Gardner solver.
//!
//! The binary (`gardner-espline`) wraps the `gardner-espline` library with
//! four subcommands:
//!
//! - `run <config>`: solve one experiment and write `snapshots.csv`,
//!   `conservation.csv`, `errors.csv` (when an exact solution exists), and
//!   `run_summary.txt` into the configured output directory;
//! - `table <T2..T6> --out <path>`: regenerate one of the five benchmark
//!   tables, computed columns next to the bundled reference values;
//! - `scan <config> --zeta-min --zeta-max --points [--log-spaced]`: rank
//!   shape parameters by the maximum error at the final time;
//! - `stability <config> [--epsilon] [--phases]`: sample the von Neumann
//!   amplification factors over `[0, pi]`.
//!
//! Exit codes: `0` on success, `1` for usage or configuration problems,
//! `2` for a numerical breakdown during a solve.

pub mod commands;
pub mod config;
pub mod error;
pub mod expr;
pub mod output;
pub mod tables;

pub use error::CliError;
