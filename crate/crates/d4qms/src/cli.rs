//! Command line parsing and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{cmd_analyze, cmd_exact, cmd_run};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "d4qms", version, about = "Quantum Metropolis sampling of D4 lattice gauge theory on a 2x1 lattice")]
pub struct Cli {
    /// Flat `key = value` config file; defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Overrides the config `seed` (for `analyze`, seeds the bootstrap).
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Output directory [default: ./<subcommand>].
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for `run` [default: available cores].
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Allow energy registers outside 3..=7.
    #[arg(long, global = true)]
    pub override_qe_limit: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Physical spectrum, thermal references, QPE-distortion model and GridDist tables.
    Exact,
    /// Sample chains and write `samples.csv` plus a manifest.
    Run,
    /// Compare a run against `exact` output.
    Analyze {
        /// Directory written by `run`.
        #[arg(long, value_name = "DIR")]
        run: PathBuf,
        /// Directory written by `exact`.
        #[arg(long, value_name = "DIR")]
        exact: PathBuf,
    },
}

fn execute(cli: Cli) -> CliResult<String> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.check_qubit_limit(cli.override_qe_limit)?;
    if let Some(seed) = cli.seed {
        cfg.chain.seed = seed;
    }
    let name = match cli.command {
        Command::Exact => "exact",
        Command::Run => "run",
        Command::Analyze { .. } => "analyze",
    };
    let out = cli.out.unwrap_or_else(|| PathBuf::from(name));
    match cli.command {
        Command::Exact => {
            cmd_exact(&cfg, &out)?;
            Ok(format!("exact tables written to {}", out.display()))
        }
        Command::Run => {
            if cfg.chain.samples == 0 {
                return Err(CliError::Config("key `samples`: must be at least 1 for `run`".into()));
            }
            let workers = cli
                .workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from));
            let m = cmd_run(&cfg, &out, workers)?;
            let t = m.totals();
            Ok(format!(
                "{} samples from {} chains in {} ({} steps, acceptance {:.4}, {} aborts)",
                t.samples,
                m.chains.len(),
                out.display(),
                t.steps,
                t.accepts as f64 / t.steps.max(1) as f64,
                t.aborts
            ))
        }
        Command::Analyze { run, exact } => {
            let r = cmd_analyze(&cfg, &run, &exact, &out, cfg.chain.seed)?;
            Ok(format!(
                "{} samples; d_sup exact/distorted {:.4}, exact/qms {:.4}, distorted/qms {:.4}; report in {}",
                r.samples,
                r.d_sup.exact_vs_distorted,
                r.d_sup.exact_vs_qms,
                r.d_sup.distorted_vs_qms,
                out.display()
            ))
        }
    }
}

/// Parse `args`, run the subcommand and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
