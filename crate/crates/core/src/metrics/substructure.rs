//! Atom-type, ring-size and functional-group distributions and the
//! JSD/MAE metrics comparing generated molecules against references.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::distribution::{jsd, mae_vectors, CategoricalDistribution, DistributionError, JsdConvention};
use crate::chemgraph::{count_functional_groups, perceive, FunctionalGroupPattern, Perceived};
use crate::structio::MoleculeGraph;

pub const ATOM_LABELS: [&str; 7] = ["C", "N", "O", "F", "P", "S", "Cl"];
pub const RING_LABELS: [&str; 6] = ["3", "4", "5", "6", "7", "8"];

/// Heavy-atom counts over `ATOM_LABELS`; other elements are dropped.
pub fn atom_type_counts(mol: &MoleculeGraph) -> Vec<f64> {
    let mut c = vec![0.0; ATOM_LABELS.len()];
    for a in &mol.atoms {
        if let Some(k) = ATOM_LABELS.iter().position(|&s| s == a.element.symbol()) {
            c[k] += 1.0;
        }
    }
    c
}

/// SSSR ring counts by size; larger rings land in the last bucket.
pub fn ring_type_counts(p: &Perceived) -> Vec<f64> {
    let mut c = vec![0.0; RING_LABELS.len()];
    for r in &p.rings {
        let k = r.len().clamp(3, 8) - 3;
        c[k] += 1.0;
    }
    c
}

pub fn functional_group_counts(p: &Perceived, library: &[FunctionalGroupPattern]) -> Vec<f64> {
    count_functional_groups(p, library).into_iter().map(|n| n as f64).collect()
}

/// All three count vectors for one molecule.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstructureCounts {
    pub atoms: Vec<f64>,
    pub rings: Vec<f64>,
    pub groups: Vec<f64>,
}

impl SubstructureCounts {
    pub fn of(mol: &MoleculeGraph, library: &[FunctionalGroupPattern]) -> Self {
        let p = perceive(mol);
        SubstructureCounts {
            atoms: atom_type_counts(mol),
            rings: ring_type_counts(&p),
            groups: functional_group_counts(&p, library),
        }
    }
}

fn build(labels: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Result<CategoricalDistribution, DistributionError> {
    let mut d = CategoricalDistribution::new(labels);
    for r in rows {
        d.add(&r);
    }
    if d.molecules == 0 {
        return Err(DistributionError::EmptySet);
    }
    Ok(d)
}

fn labels_of(s: &[&str]) -> Vec<String> {
    s.iter().map(|x| x.to_string()).collect()
}

fn library_labels(library: &[FunctionalGroupPattern]) -> Vec<String> {
    library.iter().map(|p| p.id.clone()).collect()
}

pub fn atom_type_distribution(mols: &[MoleculeGraph]) -> Result<CategoricalDistribution, DistributionError> {
    build(&labels_of(&ATOM_LABELS), mols.iter().map(atom_type_counts))
}

pub fn ring_type_distribution(mols: &[MoleculeGraph]) -> Result<CategoricalDistribution, DistributionError> {
    build(&labels_of(&RING_LABELS), mols.iter().map(|m| ring_type_counts(&perceive(m))))
}

pub fn functional_group_distribution(
    mols: &[MoleculeGraph],
    library: &[FunctionalGroupPattern],
) -> Result<CategoricalDistribution, DistributionError> {
    build(
        &library_labels(library),
        mols.iter().map(|m| functional_group_counts(&perceive(m), library)),
    )
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaeMode {
    /// Mean frequencies per pocket, MAE per pocket, then the mean over pockets.
    #[default]
    PerPocket,
    /// One MAE between frequencies pooled over all pockets.
    Pooled,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SubstructureOptions {
    pub convention: JsdConvention,
    pub mae_mode: MaeMode,
}

/// Counts of the generated molecules and the reference ligands of one pocket.
#[derive(Debug, Clone, Default)]
pub struct PocketCounts {
    pub generated: Vec<SubstructureCounts>,
    pub reference: Vec<SubstructureCounts>,
}

/// jsd_at, mae_at, jsd_rt, mae_rt, jsd_fg, mae_fg; absent where a side
/// has no molecules or no mass, with a warning.
pub fn substructure_metrics(
    pockets: &[PocketCounts],
    library: &[FunctionalGroupPattern],
    opts: &SubstructureOptions,
    warnings: &mut Vec<String>,
) -> BTreeMap<String, Option<f64>> {
    type Pick = fn(&SubstructureCounts) -> &Vec<f64>;
    let kinds: [(&str, &str, Vec<String>, Pick); 3] = [
        ("jsd_at", "mae_at", labels_of(&ATOM_LABELS), |c| &c.atoms),
        ("jsd_rt", "mae_rt", labels_of(&RING_LABELS), |c| &c.rings),
        ("jsd_fg", "mae_fg", library_labels(library), |c| &c.groups),
    ];
    let mut out = BTreeMap::new();
    for (jsd_id, mae_id, labels, pick) in kinds {
        let dist_of = |side: &dyn Fn(&PocketCounts) -> &Vec<SubstructureCounts>, ps: &[&PocketCounts]| {
            build(&labels, ps.iter().flat_map(|p| side(p).iter().map(|c| pick(c).clone())))
        };
        let all: Vec<&PocketCounts> = pockets.iter().collect();
        let gen_all = dist_of(&|p| &p.generated, &all);
        let ref_all = dist_of(&|p| &p.reference, &all);
        let jsd_value = match (&gen_all, &ref_all) {
            (Ok(g), Ok(r)) => match jsd(g, r, opts.convention) {
                Ok(v) => Some(v),
                Err(e) => {
                    warnings.push(format!("{jsd_id}: {e}"));
                    None
                }
            },
            _ => {
                warnings.push(format!("{jsd_id}: generated or reference set is empty"));
                None
            }
        };
        let mae_value = match opts.mae_mode {
            MaeMode::Pooled => match (&gen_all, &ref_all) {
                (Ok(g), Ok(r)) => mae_vectors(&g.mean_frequency(), &r.mean_frequency()),
                _ => None,
            },
            MaeMode::PerPocket => {
                let per: Vec<f64> = pockets
                    .iter()
                    .filter_map(|p| {
                        let g = dist_of(&|p| &p.generated, &[p]).ok()?;
                        let r = dist_of(&|p| &p.reference, &[p]).ok()?;
                        mae_vectors(&g.mean_frequency(), &r.mean_frequency())
                    })
                    .collect();
                (!per.is_empty()).then(|| per.iter().sum::<f64>() / per.len() as f64)
            }
        };
        if mae_value.is_none() {
            warnings.push(format!("{mae_id}: no pocket with both generated and reference molecules"));
        }
        out.insert(jsd_id.to_string(), jsd_value);
        out.insert(mae_id.to_string(), mae_value);
    }
    out
}
