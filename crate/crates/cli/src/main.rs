use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fiberent_cli::commands::{self, Outcome};
use fiberent_cli::config::RunConfig;
use fiberent_cli::CliError;

/// Entanglement of multi-photon states sent through fibers with PMD and PDL.
///
/// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.
#[derive(Parser)]
#[command(name = "fiberent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file (CSV).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Witness, fidelity and pair concurrences for one configuration.
    Simulate(Common),
    /// Metrics over a parameter grid, one CSV per series.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Also plot -V against the scanned parameter.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Parameter value at which the witness reaches zero.
    Esd(Common),
    /// Whether the channel leaves the witness at its pure-state value.
    DsfCheck(Common),
    /// Compare the analytic PMD channel with frequency-grid integration.
    OracleCompare(Common),
}

fn run(cli: Cli) -> Result<(Outcome, bool), CliError> {
    let (common, svg) = match &cli.command {
        Command::Sweep { common, svg } => (common, svg.as_deref()),
        Command::Simulate(c) | Command::Esd(c) | Command::DsfCheck(c) | Command::OracleCompare(c) => (c, None),
    };
    let cfg = RunConfig::load(&common.config)?;
    let out = common.out.as_deref();
    let outcome = match &cli.command {
        Command::Simulate(_) => commands::simulate(&cfg, out)?,
        Command::Sweep { .. } => commands::sweep(&cfg, out, svg)?,
        Command::Esd(_) => commands::esd(&cfg, out)?,
        Command::DsfCheck(_) => commands::dsf(&cfg, out)?,
        Command::OracleCompare(_) => commands::oracle_compare(&cfg, out)?,
    };
    Ok((outcome, common.quiet))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((outcome, quiet)) => {
            if !quiet || outcome.exit_code != 0 {
                print!("{}", outcome.report);
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("fiberent: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
