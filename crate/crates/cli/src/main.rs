//! `sqz-sta`: design and verify shortcut protocols to squeezed thermal states.

mod artifacts;
mod commands;
mod error;
mod spec;

use artifacts::Artifacts;
use clap::{Parser, Subcommand};
use error::CliError;
use spec::ProtocolSpec;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "sqz-sta", version, about = "Design and verify shortcut protocols to squeezed thermal states")]
struct Cli {
    /// Protocol specification (JSON).
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Root directory for artifacts; each run writes to a subdirectory named by the spec hash.
    #[arg(long, global = true, default_value = "artifacts")]
    out_dir: PathBuf,
    /// Overrides the spec seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the spec Fock dimension.
    #[arg(long, global = true)]
    fock_dim: Option<usize>,
    /// Overrides the spec control grid size.
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    /// Suppress the summary line.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design the control schedules for a spec.
    Design,
    /// Simulate a control table with the Fock and Gaussian oracles.
    Verify {
        /// Control table; defaults to controls.csv in the spec's artifact directory.
        #[arg(long)]
        controls: Option<PathBuf>,
    },
    /// Accessible-variance map in dB.
    VarianceMap {
        /// Grid description (JSON); the default grid is 21×21 over [0.5, 3]².
        #[arg(long)]
        grid: Option<PathBuf>,
    },
    /// Wigner functions of the simulated and designed states at the given times.
    Wigner {
        /// Comma-separated times in [0, tf].
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        times: Vec<f64>,
    },
    /// Full two-level ion model against the adiabatically eliminated one.
    FullIonCheck,
}

fn load_spec(cli: &Cli) -> Result<(ProtocolSpec, Artifacts), CliError> {
    let path = cli.spec.as_ref().ok_or_else(|| CliError::Input("--spec is required".into()))?;
    let mut spec = ProtocolSpec::load(path)?;
    if let Some(s) = cli.seed {
        spec.seed = s;
    }
    if let Some(n) = cli.fock_dim {
        spec.fock_dim = n;
    }
    if let Some(g) = cli.grid_points {
        spec.grid_points = g;
    }
    spec.validate()?;
    let art = Artifacts::create(&cli.out_dir, spec.hash())?;
    Ok((spec, art))
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SQZ_STA_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Input(format!("SQZ_STA_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<String, CliError> {
    configure_threads()?;
    match &cli.command {
        Command::VarianceMap { grid } => commands::variance_map(grid.as_deref(), &cli.out_dir),
        Command::Design => {
            let (spec, art) = load_spec(cli)?;
            commands::design(&spec, &art)
        }
        Command::Verify { controls } => {
            let (spec, art) = load_spec(cli)?;
            commands::verify(&spec, &art, controls.as_deref())
        }
        Command::Wigner { times } => {
            let (spec, art) = load_spec(cli)?;
            commands::wigner(&spec, &art, times)
        }
        Command::FullIonCheck => {
            let (spec, art) = load_spec(cli)?;
            commands::full_ion_check(&spec, &art)
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(&cli) {
        Ok(summary) => {
            if !cli.quiet {
                println!("{summary}");
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
