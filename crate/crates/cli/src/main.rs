use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};
use magnomech::verify::{VerifyOptions, DEFAULT_SEED};

mod commands;
mod config;
mod exit;
mod output;

use commands::{Common, FiguresArgs};
use config::{Format, DEFAULT_PRECISION};

/// Squeezing-assisted magnomechanical cooling: spectra, phonon numbers,
/// sweeps and figure datasets.
#[derive(Parser, Debug)]
#[command(name = "magnomech", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// TOML or JSON config (a JSON report is also accepted).
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Significant digits in CSV output.
    #[arg(long)]
    precision: Option<usize>,
}

impl From<CommonArgs> for Common {
    fn from(a: CommonArgs) -> Self {
        Common {
            config: a.config,
            out: a.out,
            format: a.format,
            precision: a.precision,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Magnon spectrum S(omega) over a frequency grid.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        /// Add the frequency-domain oracle column.
        #[arg(long)]
        oracle: bool,
    },
    /// Scattering rates and steady-state phonon number.
    Cool {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Driven mean fields and effective coupling/squeezing.
    Steady {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// One-dimensional parameter sweep.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Datasets for a figure panel set (fig2_row1..3, fig3a, fig3b or all).
    Figures {
        which: String,
        /// Output directory.
        #[arg(long, default_value = "figures")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: usize,
        /// Points per 1-D sweep (spectra keep their own grid).
        #[arg(long)]
        points: Option<usize>,
    },
    /// Numeric 2-D squeezing optimization.
    Optimize {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the acceptance checks.
    Verify {
        /// Skip the slow optimizer check and use fewer random draws.
        #[arg(long)]
        quick: bool,
        /// Offset (rad) added to the optimal phase in the Stokes check.
        #[arg(long, allow_hyphen_values = true)]
        perturb_phase: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Write the outcomes as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Spectrum { common, oracle } => commands::spectrum(&common.into(), oracle),
        Command::Cool { common } => commands::cool(&common.into()),
        Command::Steady { common } => commands::steady(&common.into()),
        Command::Sweep { common } => commands::sweep(&common.into()),
        Command::Optimize { common } => commands::optimize(&common.into()),
        Command::Figures {
            which,
            out,
            format,
            precision,
            points,
        } => commands::figures(&FiguresArgs {
            which,
            out,
            format,
            precision,
            points,
        }),
        Command::Verify {
            quick,
            perturb_phase,
            seed,
            out,
        } => {
            let opts = VerifyOptions {
                quick,
                phase_offset: perturb_phase.unwrap_or(0.0),
                seed,
            };
            commands::verify(&opts, out.as_deref())
        }
    };
    match res {
        Ok(code) => process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(e.code);
        }
    }
}
