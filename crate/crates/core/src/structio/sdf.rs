//! V2000 SDF reader and writer.

use std::fmt::Write as _;

use thiserror::Error;

use super::{AtomRecord, BondOrder, BondRecord, MoleculeGraph};
use crate::elements::Element;

/// Failure to parse one record; `record` is 1-based.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("SDF record {record}: {reason}")]
pub struct SdfError {
    pub record: usize,
    pub reason: String,
}

/// Parses every record of a multi-record SDF. Bad records become errors in
/// place; the rest are still returned.
pub fn parse_sdf(bytes: &[u8]) -> Vec<Result<MoleculeGraph, SdfError>> {
    let text = String::from_utf8_lossy(bytes);
    let mut out = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for line in text.lines() {
        if line.trim_end() == "$$$$" {
            out.push(parse_record(&current, out.len() + 1));
            current.clear();
        } else {
            current.push(line.trim_end_matches('\r'));
        }
    }
    if current.iter().any(|l| !l.trim().is_empty()) {
        out.push(parse_record(&current, out.len() + 1));
    }
    out
}

fn field(line: &str, start: usize, end: usize) -> &str {
    let end = end.min(line.len());
    if start >= end {
        return "";
    }
    line.get(start..end).unwrap_or("").trim()
}

fn parse_counts(line: &str) -> Option<(usize, usize)> {
    let fixed = (field(line, 0, 3).parse().ok(), field(line, 3, 6).parse().ok());
    if let (Some(a), Some(b)) = fixed {
        return Some((a, b));
    }
    let mut tokens = line.split_whitespace();
    let a = tokens.next()?.parse().ok()?;
    let b = tokens.next()?.parse().ok()?;
    Some((a, b))
}

fn legacy_charge(code: i32) -> i8 {
    match code {
        1 => 3,
        2 => 2,
        3 => 1,
        5 => -1,
        6 => -2,
        7 => -3,
        _ => 0,
    }
}

fn parse_atom(line: &str) -> Result<AtomRecord, String> {
    let coords: Option<Vec<f64>> = [(0, 10), (10, 20), (20, 30)]
        .iter()
        .map(|&(s, e)| field(line, s, e).parse().ok())
        .collect();
    let (position, symbol, charge_code) = match coords {
        Some(c) if !field(line, 31, 34).is_empty() => (
            [c[0], c[1], c[2]],
            field(line, 31, 34).to_string(),
            field(line, 36, 39).parse::<i32>().unwrap_or(0),
        ),
        _ => {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() < 4 {
                return Err(format!("malformed atom line '{line}'"));
            }
            let p: Result<Vec<f64>, _> = t[..3].iter().map(|s| s.parse::<f64>()).collect();
            let p = p.map_err(|_| format!("bad coordinates in atom line '{line}'"))?;
            let code = t.get(5).and_then(|s| s.parse().ok()).unwrap_or(0);
            ([p[0], p[1], p[2]], t[3].to_string(), code)
        }
    };
    if position.iter().any(|v| !v.is_finite()) {
        return Err(format!("non-finite coordinate in atom line '{line}'"));
    }
    let element =
        Element::from_symbol(&symbol).ok_or_else(|| format!("unknown element '{symbol}'"))?;
    Ok(AtomRecord {
        element,
        position,
        formal_charge: legacy_charge(charge_code),
    })
}

fn parse_bond(line: &str, n_atoms: usize) -> Result<BondRecord, String> {
    let fixed: Option<Vec<usize>> = [(0, 3), (3, 6), (6, 9)]
        .iter()
        .map(|&(s, e)| field(line, s, e).parse().ok())
        .collect();
    let v = match fixed {
        Some(v) => v,
        None => {
            let t: Option<Vec<usize>> = line
                .split_whitespace()
                .take(3)
                .map(|s| s.parse().ok())
                .collect();
            match t {
                Some(t) if t.len() == 3 => t,
                _ => return Err(format!("malformed bond line '{line}'")),
            }
        }
    };
    for &idx in &v[..2] {
        if idx == 0 || idx > n_atoms {
            return Err(format!(
                "bond references atom {idx} but the record has {n_atoms} atoms"
            ));
        }
    }
    let order = match v[2] {
        1 => BondOrder::Single,
        2 => BondOrder::Double,
        3 => BondOrder::Triple,
        4 => BondOrder::Aromatic,
        other => return Err(format!("unsupported bond type {other}")),
    };
    Ok(BondRecord::new(v[0] - 1, v[1] - 1, order))
}

fn parse_record(lines: &[&str], ordinal: usize) -> Result<MoleculeGraph, SdfError> {
    let err = |reason: String| SdfError {
        record: ordinal,
        reason,
    };
    if lines.len() < 4 {
        return Err(err("record shorter than the header block".into()));
    }
    let name = lines[0].trim().to_string();
    let counts = lines[3];
    if counts.contains("V3000") {
        return Err(err("V3000 connection tables are not supported".into()));
    }
    let (n_atoms, n_bonds) =
        parse_counts(counts).ok_or_else(|| err(format!("malformed counts line '{counts}'")))?;
    if lines.len() < 4 + n_atoms + n_bonds {
        return Err(err("record truncated before the end of the connection table".into()));
    }
    let mut atoms = Vec::with_capacity(n_atoms);
    for line in &lines[4..4 + n_atoms] {
        atoms.push(parse_atom(line).map_err(&err)?);
    }
    let mut bonds = Vec::with_capacity(n_bonds);
    for line in &lines[4 + n_atoms..4 + n_atoms + n_bonds] {
        bonds.push(parse_bond(line, n_atoms).map_err(&err)?);
    }
    let mut charge_block: Option<Vec<(usize, i8)>> = None;
    for line in &lines[4 + n_atoms + n_bonds..] {
        if line.starts_with("M  END") {
            break;
        }
        if let Some(rest) = line.strip_prefix("M  CHG") {
            let values: Vec<i64> = rest
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| err(format!("malformed charge line '{line}'"))))
                .collect::<Result<_, _>>()?;
            let block = charge_block.get_or_insert_with(Vec::new);
            for pair in values.get(1..).unwrap_or(&[]).chunks(2) {
                if let [atom, charge] = *pair {
                    if atom < 1 || atom as usize > n_atoms {
                        return Err(err(format!("charge entry for atom {atom} out of range")));
                    }
                    block.push((atom as usize - 1, charge as i8));
                }
            }
        }
    }
    if let Some(block) = charge_block {
        for a in &mut atoms {
            a.formal_charge = 0;
        }
        for (idx, charge) in block {
            atoms[idx].formal_charge = charge;
        }
    }
    if atoms.is_empty() {
        return Err(err("record has no atoms".into()));
    }
    MoleculeGraph::new(name, atoms, bonds).map_err(|e| err(e.to_string()))
}

fn bond_code(order: BondOrder) -> u8 {
    match order {
        BondOrder::Single => 1,
        BondOrder::Double => 2,
        BondOrder::Triple => 3,
        BondOrder::Aromatic => 4,
    }
}

/// Writes molecules as V2000 records. Charges go to `M  CHG` lines.
pub fn write_sdf(mols: &[MoleculeGraph]) -> String {
    let mut s = String::new();
    for mol in mols {
        let _ = writeln!(s, "{}", mol.name);
        s.push_str("  pocketbench\n\n");
        let _ = writeln!(
            s,
            "{:3}{:3}  0  0  0  0  0  0  0  0999 V2000",
            mol.atoms.len(),
            mol.bonds.len()
        );
        for a in &mol.atoms {
            let _ = writeln!(
                s,
                "{:10.4}{:10.4}{:10.4} {:<3} 0  0  0  0  0  0  0  0  0  0  0  0",
                a.position[0],
                a.position[1],
                a.position[2],
                a.element.symbol()
            );
        }
        for b in &mol.bonds {
            let _ = writeln!(s, "{:3}{:3}{:3}  0", b.a + 1, b.b + 1, bond_code(b.order));
        }
        let charged: Vec<(usize, i8)> = mol
            .atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| a.formal_charge != 0)
            .map(|(i, a)| (i + 1, a.formal_charge))
            .collect();
        for chunk in charged.chunks(8) {
            let _ = write!(s, "M  CHG{:3}", chunk.len());
            for (i, c) in chunk {
                let _ = write!(s, " {i:3} {c:3}");
            }
            s.push('\n');
        }
        s.push_str("M  END\n$$$$\n");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const METHANE: &str = "methane\n  test\n\n  1  0  0  0  0  0  0  0  0  0999 V2000\n    0.0000    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0\nM  END\n$$$$\n";

    #[test]
    fn methane_single_atom() {
        let recs = parse_sdf(METHANE.as_bytes());
        assert_eq!(recs.len(), 1);
        let m = recs[0].as_ref().unwrap();
        assert_eq!(m.atoms.len(), 1);
        assert!(m.bonds.is_empty());
        assert_eq!(m.name, "methane");
    }

    #[test]
    fn empty_input() {
        assert!(parse_sdf(b"").is_empty());
        assert!(parse_sdf(b"\n\n").is_empty());
    }

    #[test]
    fn bad_bond_index_is_record_level() {
        let mut bad = String::from("bad\n\n\n  5  1  0  0  0  0  0  0  0  0999 V2000\n");
        for i in 0..5 {
            bad.push_str(&format!(
                "{:10.4}    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0\n",
                i as f64 * 1.5
            ));
        }
        bad.push_str("  1 99  1  0\nM  END\n$$$$\n");
        let text = format!("{METHANE}{bad}");
        let recs = parse_sdf(text.as_bytes());
        assert_eq!(recs.len(), 2);
        assert!(recs[0].is_ok());
        assert_eq!(recs[1].as_ref().unwrap_err().record, 2);
    }

    #[test]
    fn v3000_rejected() {
        let text = "x\n\n\n  0  0  0     0  0            999 V3000\nM  END\n$$$$\n";
        let err = parse_sdf(text.as_bytes()).remove(0).unwrap_err();
        assert!(err.reason.contains("V3000"));
    }

    #[test]
    fn chg_block_overrides_legacy_column() {
        let text = "x\n\n\n  2  1  0  0  0  0  0  0  0  0999 V2000\n    0.0000    0.0000    0.0000 N   0  3  0  0  0  0  0  0  0  0  0  0\n    1.2000    0.0000    0.0000 O   0  0  0  0  0  0  0  0  0  0  0  0\n  1  2  1  0\nM  CHG  1   2  -1\nM  END\n$$$$\n";
        let m = parse_sdf(text.as_bytes()).remove(0).unwrap();
        assert_eq!(m.atoms[0].formal_charge, 0);
        assert_eq!(m.atoms[1].formal_charge, -1);
    }

    #[test]
    fn legacy_charge_without_block() {
        let text = "x\n\n\n  1  0  0  0  0  0  0  0  0  0999 V2000\n    0.0000    0.0000    0.0000 N   0  3  0  0  0  0  0  0  0  0  0  0\nM  END\n$$$$\n";
        let m = parse_sdf(text.as_bytes()).remove(0).unwrap();
        assert_eq!(m.atoms[0].formal_charge, 1);
    }

    #[test]
    fn round_trip() {
        let text = "x\n\n\n  3  2  0  0  0  0  0  0  0  0999 V2000\n    0.0000    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0\n    1.2000    0.0000    0.0000 O   0  0  0  0  0  0  0  0  0  0  0  0\n   -0.7000    1.1000    0.0000 N   0  0  0  0  0  0  0  0  0  0  0  0\n  1  2  2  0\n  1  3  1  0\nM  CHG  1   3   1\nM  END\n$$$$\n";
        let first = parse_sdf(text.as_bytes()).remove(0).unwrap();
        let again = parse_sdf(write_sdf(&[first.clone()]).as_bytes())
            .remove(0)
            .unwrap();
        assert_eq!(first, again);
    }
}
