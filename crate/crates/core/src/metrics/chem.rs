//! Per-molecule chemical profile (logP, Lipinski descriptors) and QED/SA
//! values supplied from outside.
//!
//! Property CSV, with or without a header row:
//!
//! ```text
//! ordinal,qed,sa
//! 0,0.46,0.66
//! ```
//!
//! or `pocket_id,ordinal,qed,sa`, in which case only rows for the pocket
//! being evaluated are used. Empty cells are absent values. Values must
//! lie in [0, 1].

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use super::crippen::crippen_logp;
use crate::chemgraph::{perceive, rotatable_bond_count, Perceived};
use crate::elements::Element;
use crate::external::{run_captured, ExternalError};
use crate::structio::{write_sdf, MoleculeGraph};

pub const LOGP_RANGE: (f64, f64) = (-0.4, 5.6);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChemProfile {
    pub qed: Option<f64>,
    pub sa: Option<f64>,
    pub logp: f64,
    pub lpsk: u8,
    pub mol_weight: f64,
    pub hbd: u32,
    pub hba: u32,
    pub rot_bonds: u32,
}

/// Average mass including valence-implied hydrogens.
pub fn molecular_weight(p: &Perceived) -> f64 {
    let h = Element::H.mass();
    (0..p.len()).map(|i| p.element(i).mass() + f64::from(p.hydrogens[i]) * h).sum()
}

/// N and O atoms.
pub fn hba_count(p: &Perceived) -> u32 {
    (0..p.len()).filter(|&i| matches!(p.element(i).number(), 7 | 8)).count() as u32
}

/// N and O atoms carrying at least one hydrogen.
pub fn hbd_count(p: &Perceived) -> u32 {
    (0..p.len())
        .filter(|&i| matches!(p.element(i).number(), 7 | 8) && p.hydrogens[i] > 0)
        .count() as u32
}

/// Satisfied criteria among MW <= 500, logP <= 5, HBD <= 5, HBA <= 10,
/// rotatable bonds <= 10.
pub fn lipinski_count(mol_weight: f64, logp: f64, hbd: u32, hba: u32, rot_bonds: u32) -> u8 {
    [mol_weight <= 500.0, logp <= 5.0, hbd <= 5, hba <= 10, rot_bonds <= 10]
        .iter()
        .filter(|&&ok| ok)
        .count() as u8
}

pub fn logp_in_drug_range(logp: f64) -> bool {
    (LOGP_RANGE.0..=LOGP_RANGE.1).contains(&logp)
}

pub fn chem_profile(mol: &MoleculeGraph, props: MolProperties) -> ChemProfile {
    let p = perceive(mol);
    let logp = crippen_logp(&p);
    let mol_weight = molecular_weight(&p);
    let hbd = hbd_count(&p);
    let hba = hba_count(&p);
    let rot_bonds = rotatable_bond_count(&p) as u32;
    ChemProfile {
        qed: props.qed,
        sa: props.sa,
        logp,
        lpsk: lipinski_count(mol_weight, logp, hbd, hba, rot_bonds),
        mol_weight,
        hbd,
        hba,
        rot_bonds,
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Means over molecules: qed, sa (over molecules that have them), logp, lpsk.
pub fn chem_metrics(profiles: &[ChemProfile]) -> BTreeMap<String, Option<f64>> {
    BTreeMap::from([
        ("qed".to_string(), mean(profiles.iter().filter_map(|p| p.qed))),
        ("sa".to_string(), mean(profiles.iter().filter_map(|p| p.sa))),
        ("logp".to_string(), mean(profiles.iter().map(|p| p.logp))),
        ("lpsk".to_string(), mean(profiles.iter().map(|p| f64::from(p.lpsk)))),
    ])
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct MolProperties {
    pub qed: Option<f64>,
    pub sa: Option<f64>,
}

#[derive(Debug, Error)]
pub enum PropertyError {
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("line {line}: {name}={value} outside [0, 1]")]
    Range { line: usize, name: &'static str, value: f64 },
    #[error("reading {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Program(#[from] ExternalError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PropertyProvider {
    /// No provider: QED/SA stay absent.
    Disabled,
    Sidecar(PathBuf),
    /// Receives the molecules as SDF on stdin, answers with the CSV on stdout.
    Program { argv: Vec<String>, timeout: Duration },
}

fn parse_unit(cell: &str, line: usize, name: &'static str) -> Result<Option<f64>, PropertyError> {
    let cell = cell.trim();
    if cell.is_empty() || cell.eq_ignore_ascii_case("na") {
        return Ok(None);
    }
    let value: f64 = cell.parse().map_err(|_| PropertyError::Format {
        line,
        reason: format!("'{cell}' is not a number"),
    })?;
    if !(0.0..=1.0).contains(&value) {
        return Err(PropertyError::Range { line, name, value });
    }
    Ok(Some(value))
}

/// Parses property CSV text into ordinal -> values. With a pocket column,
/// rows of other pockets are ignored when `pocket` is given.
pub fn parse_property_csv(text: &str, pocket: Option<&str>) -> Result<BTreeMap<usize, MolProperties>, PropertyError> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = raw.split(',').map(str::trim).collect();
        let (pocket_cell, rest) = match cells.len() {
            3 => (None, &cells[..]),
            4 => (Some(cells[0]), &cells[1..]),
            n => {
                return Err(PropertyError::Format {
                    line,
                    reason: format!("expected 3 or 4 fields, found {n}"),
                })
            }
        };
        if line == 1 && rest[0].eq_ignore_ascii_case("ordinal") {
            continue;
        }
        if let (Some(want), Some(have)) = (pocket, pocket_cell) {
            if want != have {
                continue;
            }
        }
        let ordinal: usize = rest[0].parse().map_err(|_| PropertyError::Format {
            line,
            reason: format!("bad ordinal '{}'", rest[0]),
        })?;
        out.insert(
            ordinal,
            MolProperties {
                qed: parse_unit(rest[1], line, "qed")?,
                sa: parse_unit(rest[2], line, "sa")?,
            },
        );
    }
    Ok(out)
}

/// Values per molecule, joined by record ordinal; missing rows are absent.
pub fn fetch_external_properties(
    mols: &[MoleculeGraph],
    provider: &PropertyProvider,
    pocket: Option<&str>,
) -> Result<Vec<MolProperties>, PropertyError> {
    let table = match provider {
        PropertyProvider::Disabled => BTreeMap::new(),
        PropertyProvider::Sidecar(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| PropertyError::Read {
                path: path.clone(),
                source,
            })?;
            parse_property_csv(&text, pocket)?
        }
        PropertyProvider::Program { argv, timeout } => {
            let sdf = write_sdf(mols);
            let out = run_captured(argv, Some(sdf.as_bytes()), *timeout)?;
            parse_property_csv(&out.stdout, pocket)?
        }
    };
    Ok((0..mols.len()).map(|i| table.get(&i).copied().unwrap_or_default()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lipinski_examples() {
        assert_eq!(lipinski_count(300.0, 2.0, 1, 3, 4), 5);
        assert_eq!(lipinski_count(600.0, 6.0, 6, 11, 11), 0);
        assert_eq!(lipinski_count(501.0, 5.0, 5, 10, 10), 4);
    }

    #[test]
    fn logp_range_is_closed() {
        assert!(logp_in_drug_range(0.56));
        assert!(!logp_in_drug_range(-0.41));
        assert!(logp_in_drug_range(5.6));
        assert!(logp_in_drug_range(-0.4));
    }

    #[test]
    fn sidecar_row_joins_by_ordinal() {
        let t = parse_property_csv("0,0.46,0.66\n2,,0.5\n", None).unwrap();
        assert_eq!(t[&0], MolProperties { qed: Some(0.46), sa: Some(0.66) });
        assert_eq!(t[&2].qed, None);
        assert!(!t.contains_key(&3));
    }

    #[test]
    fn header_and_pocket_column() {
        let text = "pocket_id,ordinal,qed,sa\n1abc,0,0.4,0.6\n2xyz,0,0.9,0.9\n";
        let t = parse_property_csv(text, Some("1abc")).unwrap();
        assert_eq!(t[&0].qed, Some(0.4));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(matches!(
            parse_property_csv("0,1.3,0.5", None),
            Err(PropertyError::Range { name: "qed", .. })
        ));
    }
}
