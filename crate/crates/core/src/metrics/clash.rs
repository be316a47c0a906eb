//! Ligand-pocket steric clashes: a heavy ligand atom clashes when some heavy
//! pocket atom overlaps it by at least the cutoff,
//! `vdw_i + vdw_j - d >= cutoff`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{dist, Vec3};
use crate::structio::{MoleculeGraph, PocketStructure};

pub const CLASH_OVERLAP: f64 = 0.4;
const EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClashError {
    #[error("pocket has no heavy atoms")]
    EmptyPocket,
}

fn overlaps(ri: f64, pi: Vec3, rj: f64, pj: Vec3, cutoff: f64) -> bool {
    ri + rj - dist(pi, pj) >= cutoff - EPS
}

struct PocketAtoms {
    radius: Vec<f64>,
    position: Vec<Vec3>,
}

fn heavy_pocket(pocket: &PocketStructure) -> Result<PocketAtoms, ClashError> {
    let (radius, position): (Vec<f64>, Vec<Vec3>) = pocket
        .atoms
        .iter()
        .filter(|a| !a.element.is_hydrogen())
        .map(|a| (a.element.vdw_radius(), a.position))
        .unzip();
    if radius.is_empty() {
        return Err(ClashError::EmptyPocket);
    }
    Ok(PocketAtoms { radius, position })
}

/// Flags per ligand atom (hydrogens are never flagged), pair scan.
pub fn detect_clashes_brute_force(
    mol: &MoleculeGraph,
    pocket: &PocketStructure,
    cutoff: f64,
) -> Result<Vec<bool>, ClashError> {
    let p = heavy_pocket(pocket)?;
    Ok(mol
        .atoms
        .iter()
        .map(|a| {
            !a.element.is_hydrogen()
                && (0..p.radius.len())
                    .any(|j| overlaps(a.element.vdw_radius(), a.position, p.radius[j], p.position[j], cutoff))
        })
        .collect())
}

/// Same flags as the pair scan, using a uniform grid over the pocket.
pub fn detect_clashes(mol: &MoleculeGraph, pocket: &PocketStructure, cutoff: f64) -> Result<Vec<bool>, ClashError> {
    let p = heavy_pocket(pocket)?;
    let max_pocket_r = p.radius.iter().cloned().fold(0.0, f64::max);
    let max_lig_r = mol
        .atoms
        .iter()
        .filter(|a| !a.element.is_hydrogen())
        .map(|a| a.element.vdw_radius())
        .fold(0.0, f64::max);
    // any clashing pair is closer than this, so neighbors are within one cell
    let cell = (max_pocket_r + max_lig_r - cutoff + 1e-6).max(0.5);
    let key = |x: Vec3| -> [i64; 3] { [0, 1, 2].map(|k| (x[k] / cell).floor() as i64) };
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (j, &x) in p.position.iter().enumerate() {
        grid.entry(key(x)).or_default().push(j);
    }
    Ok(mol
        .atoms
        .iter()
        .map(|a| {
            if a.element.is_hydrogen() {
                return false;
            }
            let c = key(a.position);
            let r = a.element.vdw_radius();
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if let Some(list) = grid.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                            if list
                                .iter()
                                .any(|&j| overlaps(r, a.position, p.radius[j], p.position[j], cutoff))
                            {
                                return true;
                            }
                        }
                    }
                }
            }
            false
        })
        .collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClashReport {
    pub clashing_atom_count: u64,
    pub total_atom_count: u64,
    pub molecules_with_clash: u64,
    pub total_molecules: u64,
}

impl ClashReport {
    /// Adds one molecule's flags; hydrogens are not counted as atoms.
    pub fn add(&mut self, mol: &MoleculeGraph, flags: &[bool]) {
        let clashing = flags.iter().filter(|&&f| f).count() as u64;
        self.clashing_atom_count += clashing;
        self.total_atom_count += mol.heavy_atom_count() as u64;
        self.molecules_with_clash += u64::from(clashing > 0);
        self.total_molecules += 1;
    }

    pub fn merge(&mut self, other: &ClashReport) {
        self.clashing_atom_count += other.clashing_atom_count;
        self.total_atom_count += other.total_atom_count;
        self.molecules_with_clash += other.molecules_with_clash;
        self.total_molecules += other.total_molecules;
    }

    pub fn ratio_cca(&self) -> Option<f64> {
        (self.total_atom_count > 0).then(|| self.clashing_atom_count as f64 / self.total_atom_count as f64)
    }

    pub fn ratio_cm(&self) -> Option<f64> {
        (self.total_molecules > 0).then(|| self.molecules_with_clash as f64 / self.total_molecules as f64)
    }
}

/// Ratios averaged over pockets instead of pooled.
pub fn per_pocket_ratios(reports: &[ClashReport]) -> (Option<f64>, Option<f64>) {
    let mean = |v: Vec<f64>| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    (
        mean(reports.iter().filter_map(ClashReport::ratio_cca).collect()),
        mean(reports.iter().filter_map(ClashReport::ratio_cm).collect()),
    )
}
