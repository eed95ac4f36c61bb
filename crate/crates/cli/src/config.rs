use std::path::{Path, PathBuf};

use fieldloc::lattice::{LatticeConfig, Region};
use fieldloc::schemes::{Geometry, ProbeSettings};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA: &str = "fieldloc-run/1";

pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub lattice: LatticeSection,
    pub fock: FockSection,
    pub geometry: GeometrySection,
    pub antilocality: AntilocalitySection,
    pub vacuum: VacuumSection,
    pub cyclicity: CyclicitySection,
    pub correlation: CorrelationSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub n_sites: usize,
    pub spacing: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockSection {
    pub n_modes: usize,
    pub cutoff: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub region1: Interval,
    pub region2: Interval,
    pub time_window: [f64; 2],
    pub n_times: usize,
    pub shift: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntilocalitySection {
    pub masses: Vec<f64>,
    pub n_sites: usize,
    pub spacing: f64,
    pub probes: usize,
    pub probe_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VacuumSection {
    pub n_sites: usize,
    pub spacing: f64,
    pub cutoffs: Vec<usize>,
    pub weyl_pairs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CyclicitySection {
    pub samples: usize,
    pub random_vectors: usize,
    pub rank_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationSection {
    pub masses: Vec<f64>,
    pub n_sites: Vec<usize>,
    pub spacing: f64,
}

impl RunConfig {
    pub fn default_config() -> Self {
        Self::parse(DEFAULT_CONFIG, Path::new("<built-in default>")).expect("built-in config is valid")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|source| CliError::ParseConfig {
            path: origin.to_path_buf(),
            source,
        })?;
        cfg.validate().map_err(|msg| CliError::InvalidConfig {
            path: origin.to_path_buf(),
            msg,
        })?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        if self.schema != SCHEMA {
            return Err(format!("unsupported schema {:?}, expected {SCHEMA:?}", self.schema));
        }
        self.lattice().map_err(|e| e.to_string())?;
        if self.fock.n_modes != 2 {
            return Err(format!(
                "the Reeh-Schlieder probes use a two-mode space, got n_modes = {}",
                self.fock.n_modes
            ));
        }
        let g = &self.geometry;
        if g.time_window[0] > g.time_window[1] {
            return Err("time_window must be [start, end] with start <= end".into());
        }
        if g.n_times == 0 {
            return Err("n_times must be positive".into());
        }
        if self.antilocality.masses.is_empty() || self.correlation.masses.is_empty() {
            return Err("mass sweeps must not be empty".into());
        }
        if self.correlation.n_sites.is_empty() {
            return Err("correlation.n_sites must not be empty".into());
        }
        if self.antilocality.probe_len == 0 || self.antilocality.probe_len >= self.antilocality.n_sites {
            return Err("antilocality.probe_len must be in 1..n_sites".into());
        }
        if self.vacuum.cutoffs.is_empty() {
            return Err("vacuum.cutoffs must not be empty".into());
        }
        if !(self.cyclicity.rank_tol > 0.0) {
            return Err("cyclicity.rank_tol must be positive".into());
        }
        Ok(())
    }

    pub fn lattice(&self) -> fieldloc::Result<LatticeConfig> {
        LatticeConfig::new(self.lattice.n_sites, self.lattice.spacing, self.lattice.mass)
    }

    pub fn geometry(&self) -> fieldloc::Result<Geometry> {
        let lattice = self.lattice()?;
        let n = lattice.n_sites();
        let g = &self.geometry;
        let [t0, t1] = g.time_window;
        let times = if g.n_times == 1 {
            vec![t0]
        } else {
            (0..g.n_times)
                .map(|k| t0 + (t1 - t0) * k as f64 / (g.n_times - 1) as f64)
                .collect()
        };
        Ok(Geometry {
            lattice,
            region1: Region::interval(n, g.region1.start, g.region1.len)?,
            region2: Region::interval(n, g.region2.start, g.region2.len)?,
            times,
            shift: g.shift,
        })
    }

    pub fn probe_settings(&self) -> ProbeSettings {
        ProbeSettings {
            cutoff: self.fock.cutoff,
            samples: self.cyclicity.samples,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips() {
        let cfg = RunConfig::default_config();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::parse(&text, Path::new("x")).unwrap(), cfg);
        let geo = cfg.geometry().unwrap();
        assert!(geo.region1.is_disjoint(&geo.region2));
        assert_eq!(geo.times.len(), cfg.geometry.n_times);
    }

    #[test]
    fn rejects_bad_schema_and_unknown_fields() {
        let bad = DEFAULT_CONFIG.replace("fieldloc-run/1", "fieldloc-run/0");
        assert!(matches!(
            RunConfig::parse(&bad, Path::new("x")),
            Err(CliError::InvalidConfig { .. })
        ));
        let extra = DEFAULT_CONFIG.replacen('{', "{ \"colour\": 1,", 1);
        assert!(matches!(
            RunConfig::parse(&extra, Path::new("x")),
            Err(CliError::ParseConfig { .. })
        ));
    }

    #[test]
    fn rejects_unphysical_lattice() {
        let bad = DEFAULT_CONFIG.replace("\"mass\": 1.0", "\"mass\": -1.0");
        assert!(RunConfig::parse(&bad, Path::new("x")).is_err());
    }
}
