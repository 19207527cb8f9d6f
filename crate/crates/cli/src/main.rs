mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use qscalar::{Profile64, ProfileLabel, Splitting};

use crate::commands::Sweep;
use crate::config::Scenario;

/// Spectral quantum simulation of scalar transport in shear flows.
///
/// The largest register defaults to 26 qubits; override it with
/// QSCALAR_MAX_QUBITS.
#[derive(Parser)]
#[command(name = "qscalar", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Trotter,
    Strang,
}

impl From<SplitArg> for Splitting {
    fn from(s: SplitArg) -> Self {
        match s {
            SplitArg::Trotter => Splitting::Trotter,
            SplitArg::Strang => Splitting::Strang,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write checkpoint fields plus a summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        #[arg(long, value_enum)]
        splitting: Option<SplitArg>,
    },
    /// Error sweep over grid sizes (1D pulse) or step counts.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Comma-separated grid sizes, e.g. 8,16,32.
        #[arg(long, value_delimiter = ',', conflicts_with = "steps", required_unless_present = "steps")]
        grid_sizes: Option<Vec<usize>>,
        /// Comma-separated step counts, e.g. 4,8,16,32.
        #[arg(long, value_delimiter = ',')]
        steps: Option<Vec<usize>>,
    },
    /// Gate counts of the shear advection circuit over a qubit range.
    Gatecount {
        /// Profile name (uniform, couette, poiseuille, blasius).
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Export and simulate the shallow fresh-ancilla demo circuit.
    HardwareDemo {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Run a scenario and reconstruct the final state from samples.
    Sample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        #[arg(long, value_enum)]
        splitting: Option<SplitArg>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run {
            config,
            out_dir,
            splitting,
        } => {
            let s = Scenario::load(&config)?.with_splitting(splitting.map(Into::into));
            commands::run(&s, &out_dir)
        }
        Command::Converge {
            config,
            out_dir,
            grid_sizes,
            steps,
        } => {
            let s = Scenario::load(&config)?;
            let sweep = match (grid_sizes, steps) {
                (Some(g), _) => Sweep::GridSizes(g),
                (None, Some(s)) => Sweep::StepCounts(s),
                (None, None) => unreachable!("clap requires one sweep"),
            };
            let table = commands::converge(&s, &sweep)?;
            std::fs::create_dir_all(&out_dir)?;
            table.save(&out_dir.join("converge.csv"))?;
            table.write_to(std::io::stdout())
        }
        Command::Gatecount {
            profile,
            n_min,
            n_max,
            out_dir,
        } => {
            let label: ProfileLabel = profile.parse()?;
            let table = commands::gatecount(&Profile64::named(label)?, n_min, n_max)?;
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir)?;
                table.save(&dir.join(format!("gatecount_{label}.csv")))?;
            }
            table.write_to(std::io::stdout())
        }
        Command::HardwareDemo {
            n,
            shots,
            seed,
            out_dir,
        } => commands::hardware_demo(n, shots, seed, &out_dir),
        Command::Sample {
            config,
            shots,
            seed,
            out_dir,
            splitting,
        } => {
            let s = Scenario::load(&config)?.with_splitting(splitting.map(Into::into));
            commands::sample(&s, shots, seed, &out_dir)
        }
    }
}
