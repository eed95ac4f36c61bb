//! Experiment driver for `fieldloc`: reads a JSON run configuration, runs
//! the named experiments and writes CSV tables plus a JSON report each.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};

use log::info;

pub use config::RunConfig;
pub use error::CliError;
use experiments::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Antilocality,
    Vacuum,
    Cyclicity,
    Microcausality,
    CompareSchemes,
    Correlation,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Antilocality,
        Experiment::Vacuum,
        Experiment::Cyclicity,
        Experiment::Microcausality,
        Experiment::CompareSchemes,
        Experiment::Correlation,
    ];
}

/// Per-run overrides of config values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub masses: Option<Vec<f64>>,
    pub samples: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(s) = self.samples {
            cfg.cyclicity.samples = s;
        }
    }
}

pub fn run_experiment(exp: Experiment, cfg: &RunConfig, overrides: &Overrides) -> Result<Outcome, CliError> {
    use experiments as x;
    match exp {
        Experiment::Antilocality => {
            let masses = overrides.masses.as_deref().unwrap_or(&cfg.antilocality.masses);
            x::antilocality(cfg, masses)
        }
        Experiment::Vacuum => x::vacuum(cfg),
        Experiment::Cyclicity => x::cyclicity(cfg, cfg.cyclicity.samples),
        Experiment::Microcausality => x::microcausality(cfg),
        Experiment::CompareSchemes => x::compare_schemes(cfg),
        Experiment::Correlation => {
            let masses = overrides.masses.as_deref().unwrap_or(&cfg.correlation.masses);
            x::correlation(cfg, masses)
        }
    }
}

/// Runs the experiments and writes their outputs; returns the written paths.
pub fn run(
    experiments: &[Experiment],
    config_path: Option<&Path>,
    overrides: &Overrides,
) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = match config_path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default_config(),
    };
    overrides.apply(&mut cfg);
    output::ensure_dir(&cfg.output_dir)?;
    let mut written = Vec::new();
    for &exp in experiments {
        let out = run_experiment(exp, &cfg, overrides)?;
        for t in &out.tables {
            written.push(t.write(&cfg.output_dir)?);
        }
        written.push(output::write_json(&cfg.output_dir, out.name, &out.report)?);
        info!("{}: done", out.name);
    }
    Ok(written)
}
