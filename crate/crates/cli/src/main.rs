use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fieldloc_cli::{run, Experiment, Overrides};

/// Localization experiments for a free scalar field on a periodic lattice.
///
/// Log verbosity is read from FIELDLOC_LOG (e.g. FIELDLOC_LOG=info).
#[derive(Debug, Parser)]
#[command(name = "fieldloc", version)]
struct Cli {
    /// Run configuration (JSON); the built-in default when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decay of the H kernel and tails of compactly supported data.
    Antilocality {
        /// Comma-separated masses to sweep.
        #[arg(long, value_delimiter = ',')]
        sweep_mass: Option<Vec<f64>>,
    },
    /// Vacuum factorization across schemes and the truncated Weyl relation.
    Vacuum,
    /// Vacuum cyclicity ranks and separating probes.
    Cyclicity {
        /// Sampled algebra elements in the separating probe.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Weak and strong microcausality defects over the time window.
    Microcausality,
    /// Fundamentality reports for both schemes.
    CompareSchemes,
    /// Vacuum correlation length against the Compton length.
    Correlation {
        /// Comma-separated masses to sweep.
        #[arg(long, value_delimiter = ',')]
        sweep_mass: Option<Vec<f64>>,
    },
    /// Every experiment in turn.
    All,
    /// Print the built-in default configuration.
    DefaultConfig,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FIELDLOC_LOG", "warn")).init();
    let cli = Cli::parse();
    let mut overrides = Overrides {
        seed: cli.seed,
        out: cli.out,
        ..Overrides::default()
    };
    let experiments = match cli.command {
        Command::Antilocality { sweep_mass } => {
            overrides.masses = sweep_mass;
            vec![Experiment::Antilocality]
        }
        Command::Vacuum => vec![Experiment::Vacuum],
        Command::Cyclicity { samples } => {
            overrides.samples = samples;
            vec![Experiment::Cyclicity]
        }
        Command::Microcausality => vec![Experiment::Microcausality],
        Command::CompareSchemes => vec![Experiment::CompareSchemes],
        Command::Correlation { sweep_mass } => {
            overrides.masses = sweep_mass;
            vec![Experiment::Correlation]
        }
        Command::All => Experiment::ALL.to_vec(),
        Command::DefaultConfig => {
            print!("{}", fieldloc_cli::config::DEFAULT_CONFIG);
            return ExitCode::SUCCESS;
        }
    };
    match run(&experiments, cli.config.as_deref(), &overrides) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fieldloc: {e}");
            ExitCode::FAILURE
        }
    }
}
