//! Affinity aggregation over docking energies: mean energy, improvement
//! rate against the reference, mean percent binding gap and ligand binding
//! efficiency.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AffinityMode {
    Score,
    Minimize,
    Dock,
}

impl AffinityMode {
    pub const ALL: [AffinityMode; 3] = [AffinityMode::Score, AffinityMode::Minimize, AffinityMode::Dock];

    pub fn as_str(self) -> &'static str {
        match self {
            AffinityMode::Score => "score",
            AffinityMode::Minimize => "minimize",
            AffinityMode::Dock => "dock",
        }
    }

    /// Suffix used in metric ids (`vina_min`, `imp_dock`, ...).
    pub fn metric_suffix(self) -> &'static str {
        match self {
            AffinityMode::Score => "score",
            AffinityMode::Minimize => "min",
            AffinityMode::Dock => "dock",
        }
    }
}

impl fmt::Display for AffinityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AffinityMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "score" | "score_only" => Ok(AffinityMode::Score),
            "minimize" | "min" | "local_only" => Ok(AffinityMode::Minimize),
            "dock" => Ok(AffinityMode::Dock),
            other => Err(format!("unknown docking mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinityRecord {
    pub pocket_id: String,
    pub molecule_ordinal: usize,
    pub mode: AffinityMode,
    /// kcal/mol, negative is favorable.
    pub energy: f64,
    pub n_lig: usize,
}

impl AffinityRecord {
    /// Positive energies are kept but treated as failed poses.
    pub fn is_valid(&self) -> bool {
        self.energy.is_finite() && self.energy <= 0.0 && self.n_lig > 0
    }

    pub fn ligand_efficiency(&self) -> f64 {
        -self.energy / self.n_lig as f64
    }
}

/// Generated records of one pocket in one mode, with the reference energy.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PocketAffinity {
    pub pocket_id: String,
    pub generated: Vec<AffinityRecord>,
    pub reference: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct AffinitySummary {
    pub mean_energy: Option<f64>,
    /// Fraction of generated records strictly below the reference energy.
    pub imp: Option<f64>,
    /// Percent.
    pub mpbg: Option<f64>,
    pub lbe: Option<f64>,
    pub valid_records: usize,
    pub invalid_records: usize,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn affinity_metrics(pockets: &[PocketAffinity], warnings: &mut Vec<String>) -> AffinitySummary {
    let mut energies = Vec::new();
    let mut lbe = Vec::new();
    let mut improved = 0usize;
    let mut compared = 0usize;
    let mut gaps = Vec::new();
    let mut invalid = 0usize;

    for p in pockets {
        let valid: Vec<&AffinityRecord> = p.generated.iter().filter(|r| r.is_valid()).collect();
        invalid += p.generated.len() - valid.len();
        energies.extend(valid.iter().map(|r| r.energy));
        lbe.extend(valid.iter().map(|r| r.ligand_efficiency()));
        let Some(e_ref) = p.reference else {
            if !p.generated.is_empty() {
                warnings.push(format!("pocket {}: no reference energy, skipped for IMP/MPBG", p.pocket_id));
            }
            continue;
        };
        compared += p.generated.len();
        improved += p.generated.iter().filter(|r| r.energy < e_ref).count();
        if e_ref >= 0.0 {
            warnings.push(format!("pocket {}: reference energy {e_ref} is not negative, skipped for MPBG", p.pocket_id));
            continue;
        }
        let per: Vec<f64> = valid.iter().map(|r| (r.energy - e_ref) / e_ref * 100.0).collect();
        if let Some(m) = mean(&per) {
            gaps.push(m);
        }
    }
    if invalid > 0 {
        warnings.push(format!("{invalid} records with positive energy excluded from energy, MPBG and LBE means"));
    }
    if energies.is_empty() {
        return AffinitySummary {
            invalid_records: invalid,
            ..Default::default()
        };
    }
    AffinitySummary {
        mean_energy: mean(&energies),
        imp: (compared > 0).then(|| improved as f64 / compared as f64),
        mpbg: mean(&gaps),
        lbe: mean(&lbe),
        valid_records: energies.len(),
        invalid_records: invalid,
    }
}
