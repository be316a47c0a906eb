//! TOML configuration. Every section is optional; thresholds default to
//! the benchmark protocol values.
//!
//! ```toml
//! manifest = "pockets.jsonl"
//! method = "my-model"
//! aspects = ["substructure", "chemical", "interaction", "geometry"]
//! jobs = 8
//! out = "results"
//!
//! [metrics]
//! jsd = "distance"          # or "base2"
//! mae = "per_pocket"        # or "pooled"
//!
//! [docking]
//! command = "vina_wrapper {receptor} {ligand} {mode}"
//! scores_file = "scores.csv"
//! modes = ["score", "minimize", "dock"]
//! timeout_secs = 600
//! jobs = 2
//!
//! [properties]
//! file = "props.csv"
//!
//! [thresholds]
//! clash_overlap = 0.4
//! validity = 0.85
//! [thresholds.profiler]
//! hbond_distance = 3.5
//! [thresholds.tasks]
//! min_fragment_atoms = 5
//!
//! [ranking]
//! profile = "published"
//! ```

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use pocketbench_core::chemgraph::bonds::{FALLBACK_TOLERANCE, STRICT_TOLERANCE};
use pocketbench_core::chemgraph::validity::{ValidityOptions, VALIDITY_THRESHOLD};
use pocketbench_core::metrics::clash::CLASH_OVERLAP;
use pocketbench_core::metrics::geometry::GeometryBins;
use pocketbench_core::metrics::interaction::{AffinityMode, ProfilerThresholds};
use pocketbench_core::metrics::substructure::MaeMode;
use pocketbench_core::metrics::JsdConvention;
use pocketbench_core::ranking::{Aspect, RankOptions};
use pocketbench_core::taskbuilder::TaskThresholds;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub manifest: Option<PathBuf>,
    pub method: Option<String>,
    pub aspects: Option<Vec<Aspect>>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub metrics: MetricsConfig,
    pub docking: DockingConfig,
    pub properties: PropertiesConfig,
    pub thresholds: Thresholds,
    pub ranking: RankingConfig,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub jsd: JsdConvention,
    pub mae: MaeMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DockingConfig {
    pub command: Option<String>,
    pub scores_file: Option<PathBuf>,
    pub modes: Vec<AffinityMode>,
    pub timeout_secs: u64,
    /// Concurrent docking processes.
    pub jobs: usize,
}

impl Default for DockingConfig {
    fn default() -> Self {
        DockingConfig {
            command: None,
            scores_file: None,
            modes: AffinityMode::ALL.to_vec(),
            timeout_secs: 600,
            jobs: 1,
        }
    }
}

impl DockingConfig {
    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout_secs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropertiesConfig {
    pub file: Option<PathBuf>,
    pub command: Option<String>,
    pub timeout_secs: u64,
}

impl Default for PropertiesConfig {
    fn default() -> Self {
        PropertiesConfig {
            file: None,
            command: None,
            timeout_secs: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub clash_overlap: f64,
    pub validity: f64,
    pub bond_tolerance: f64,
    pub fallback_bond_tolerance: f64,
    pub profiler: ProfilerThresholds,
    pub bins: GeometryBins,
    pub tasks: TaskThresholds,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            clash_overlap: CLASH_OVERLAP,
            validity: VALIDITY_THRESHOLD,
            bond_tolerance: STRICT_TOLERANCE,
            fallback_bond_tolerance: FALLBACK_TOLERANCE,
            profiler: ProfilerThresholds::default(),
            bins: GeometryBins::default(),
            tasks: TaskThresholds::default(),
        }
    }
}

impl Thresholds {
    pub fn validity_options(&self) -> ValidityOptions {
        ValidityOptions {
            strict_tolerance: self.bond_tolerance,
            fallback_tolerance: self.fallback_bond_tolerance,
            threshold: self.validity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankingConfig {
    pub profile: String,
    pub weights: Option<std::collections::BTreeMap<Aspect, f64>>,
    pub range_tie_averaged: bool,
    pub n_methods: Option<usize>,
}

impl Default for RankingConfig {
    fn default() -> Self {
        RankingConfig {
            profile: "default".into(),
            weights: None,
            range_tie_averaged: false,
            n_methods: None,
        }
    }
}

impl RankingConfig {
    pub fn options(&self) -> Result<RankOptions> {
        let mut o = RankOptions::profile(&self.profile).map_err(anyhow::Error::msg)?;
        if let Some(w) = &self.weights {
            o.weights = w.clone();
        }
        o.range_tie_averaged = self.range_tie_averaged;
        o.n_methods = self.n_methods;
        Ok(o)
    }
}

impl Config {
    /// Reads a config file; relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut c: Config = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut c.manifest,
            &mut c.out,
            &mut c.docking.scores_file,
            &mut c.properties.file,
        ]
        .into_iter()
        .flatten()
        {
            *p = base.join(&*p);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(a) = &self.aspects {
            if a.is_empty() {
                bail!("at least one aspect must be enabled");
            }
        }
        if self.jobs == Some(0) || self.docking.jobs == 0 {
            bail!("job counts must be at least 1");
        }
        let t = &self.thresholds;
        if !(0.0..=1.0).contains(&t.validity) {
            bail!("validity threshold must lie in [0, 1]");
        }
        for b in [t.bins.bond_length, t.bins.bond_angle] {
            if b.bins == 0 || b.hi <= b.lo {
                bail!("histogram binning needs hi > lo and at least one bin");
            }
        }
        Ok(())
    }

    pub fn aspects(&self) -> Vec<Aspect> {
        self.aspects.clone().unwrap_or_else(|| Aspect::ALL.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_has_protocol_defaults() {
        let c: Config = toml::from_str("").unwrap();
        assert_eq!(c.thresholds.clash_overlap, 0.4);
        assert_eq!(c.thresholds.validity, 0.85);
        assert_eq!(c.thresholds.tasks.min_fragment_atoms, 5);
        assert_eq!(c.docking.modes.len(), 3);
        assert_eq!(c.aspects().len(), 4);
    }

    #[test]
    fn overrides_and_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "manifest = \"m.jsonl\"\naspects = [\"geometry\"]\n[thresholds]\nclash_overlap = 0.5\n[thresholds.profiler]\nhbond_distance = 3.2\n[docking]\nmodes = [\"dock\"]\n",
        )
        .unwrap();
        let c = Config::load(&path).unwrap();
        assert_eq!(c.manifest.clone().unwrap(), dir.path().join("m.jsonl"));
        assert_eq!(c.aspects(), vec![Aspect::Geometry]);
        assert_eq!(c.thresholds.clash_overlap, 0.5);
        assert_eq!(c.thresholds.profiler.hbond_distance, 3.2);
        assert_eq!(c.thresholds.profiler.hydrophobic_distance, 4.0);
        assert_eq!(c.docking.modes, vec![AffinityMode::Dock]);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<Config>("[thresholds]\nclash = 1.0\n").is_err());
        assert!(toml::from_str::<Config>("aspects = []\n").unwrap().validate().is_err());
    }
}
