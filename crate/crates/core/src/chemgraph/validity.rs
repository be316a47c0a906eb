//! Rebuilding bonds for generated point clouds and the largest-fragment
//! validity rule.

use serde::{Deserialize, Serialize};

use super::bonds::{assign_bond_orders, connect, FALLBACK_TOLERANCE, STRICT_TOLERANCE};
use super::ChemError;
use crate::structio::{AtomRecord, MoleculeGraph};

pub const VALIDITY_THRESHOLD: f64 = 0.85;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReconstructionPath {
    Refine,
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityVerdict {
    pub valid: bool,
    pub largest_fragment_ratio: f64,
    pub reconstruction_path: ReconstructionPath,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityOptions {
    pub strict_tolerance: f64,
    pub fallback_tolerance: f64,
    pub threshold: f64,
}

impl Default for ValidityOptions {
    fn default() -> Self {
        ValidityOptions {
            strict_tolerance: STRICT_TOLERANCE,
            fallback_tolerance: FALLBACK_TOLERANCE,
            threshold: VALIDITY_THRESHOLD,
        }
    }
}

pub fn reconstruct_and_validate(atoms: &[AtomRecord]) -> Result<(MoleculeGraph, ValidityVerdict), ChemError> {
    reconstruct_with(atoms, &ValidityOptions::default())
}

fn build(atoms: &[AtomRecord], tolerance: f64) -> Result<(MoleculeGraph, f64), ChemError> {
    let pairs = connect(atoms, tolerance)?;
    let (bonds, charges) = assign_bond_orders(atoms, &pairs);
    let atoms: Vec<AtomRecord> = atoms
        .iter()
        .zip(charges)
        .map(|(a, c)| AtomRecord { formal_charge: c, ..*a })
        .collect();
    let mol = MoleculeGraph::new("", atoms, bonds).map_err(ChemError::Graph)?;
    let largest = mol.components().iter().map(Vec::len).max().unwrap_or(0);
    let ratio = largest as f64 / mol.len() as f64;
    Ok((mol, ratio))
}

pub fn reconstruct_with(
    atoms: &[AtomRecord],
    opts: &ValidityOptions,
) -> Result<(MoleculeGraph, ValidityVerdict), ChemError> {
    let (mol, ratio) = build(atoms, opts.strict_tolerance)?;
    if ratio > opts.threshold {
        return Ok((
            mol,
            ValidityVerdict {
                valid: true,
                largest_fragment_ratio: ratio,
                reconstruction_path: ReconstructionPath::Refine,
            },
        ));
    }
    let (mol, ratio) = build(atoms, opts.fallback_tolerance)?;
    Ok((
        mol,
        ValidityVerdict {
            valid: ratio > opts.threshold,
            largest_fragment_ratio: ratio,
            reconstruction_path: ReconstructionPath::Fallback,
        },
    ))
}

/// Largest connected fragment of `mol`, re-indexed.
pub fn largest_fragment(mol: &MoleculeGraph) -> MoleculeGraph {
    let comps = mol.components();
    // first of the largest keeps the choice deterministic
    let best = comps
        .iter()
        .fold(None::<&Vec<usize>>, |acc, c| match acc {
            Some(a) if a.len() >= c.len() => Some(a),
            _ => Some(c),
        });
    match best {
        Some(c) if c.len() < mol.len() => mol.induced_subgraph(c).0,
        _ => mol.clone(),
    }
}
