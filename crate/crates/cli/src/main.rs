//! `collapse-sim`: command line front end. Parses arguments, sizes the
//! rayon pool from COLLAPSE_SIM_THREADS, and maps errors to exit codes:
//! 0 on success (an infeasible plan is still a successful run), 2 for
//! anything wrong with the configuration, 1 for everything else.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use collapse_cli::commands::{
    cmd_diagram, cmd_plan, cmd_regions, cmd_simulate, cmd_transform, OutputTarget,
};
use collapse_cli::config::RunConfig;
use collapse_cli::{config_error, ConfigError};

#[derive(Parser)]
#[command(
    name = "collapse-sim",
    version,
    about = "Collapse-front geometry, double-measurement planning, and photon-pair simulation in 1+1-D"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write output files into this directory instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Boost events between frames and emit the coordinate pairs as CSV.
    Transform(CommonArgs),
    /// Place source and detectors for a double measurement and check
    /// feasibility.
    Plan {
        #[command(flatten)]
        common: CommonArgs,
        /// Evaluate the sweep grid declared in the plan block and emit one
        /// CSV row per parameter combination.
        #[arg(long)]
        sweep: bool,
    },
    /// Run the repeated pair-event simulation.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Override the seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Run both measurement models and report the variance comparison.
        #[arg(long)]
        compare: bool,
    },
    /// Render a spacetime diagram as SVG (plus layer CSVs with --out).
    Diagram(CommonArgs),
    /// Classify a coordinate grid into collapse regions as CSV.
    Regions(CommonArgs),
}

/// Honors COLLAPSE_SIM_THREADS before any parallel work starts. Unset or
/// empty means rayon's default.
fn init_thread_pool() -> Result<()> {
    match std::env::var("COLLAPSE_SIM_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) if raw.is_empty() => Ok(()),
        Ok(raw) => {
            let n: usize = raw.parse().map_err(|_| {
                config_error(format!(
                    "COLLAPSE_SIM_THREADS must be a positive integer, got {raw:?}"
                ))
            })?;
            if n == 0 {
                return Err(config_error("COLLAPSE_SIM_THREADS must be at least 1"));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| config_error(format!("cannot size the thread pool: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    init_thread_pool()?;
    match cli.command {
        Command::Transform(c) => {
            let cfg = RunConfig::load(&c.config)?;
            cmd_transform(&cfg, &OutputTarget::from_arg(c.out))
        }
        Command::Plan { common, sweep } => {
            let cfg = RunConfig::load(&common.config)?;
            cmd_plan(&cfg, &OutputTarget::from_arg(common.out), sweep)
        }
        Command::Simulate {
            common,
            seed,
            compare,
        } => {
            let cfg = RunConfig::load(&common.config)?;
            cmd_simulate(&cfg, &OutputTarget::from_arg(common.out), seed, compare)
        }
        Command::Diagram(c) => {
            let cfg = RunConfig::load(&c.config)?;
            cmd_diagram(&cfg, &OutputTarget::from_arg(c.out))
        }
        Command::Regions(c) => {
            let cfg = RunConfig::load(&c.config)?;
            cmd_regions(&cfg, &OutputTarget::from_arg(c.out))
        }
    }
}

/// True when the root cause is stdout's reader hanging up (EPIPE). The csv
/// writer wraps the io error without exposing it as a source, so that layer
/// is unwrapped by hand.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let io = c.downcast_ref::<std::io::Error>().or_else(|| {
            c.downcast_ref::<csv::Error>().and_then(|c| match c.kind() {
                csv::ErrorKind::Io(io) => Some(io),
                _ => None,
            })
        });
        io.is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // A reader that hung up mid-stream (`... | head`) ended the
            // conversation; that is not an error worth reporting.
            if is_broken_pipe(&e) {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.downcast_ref::<ConfigError>().is_some()) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
