//! Fixed-column PDB reader for protein pockets (ATOM records only).

use std::collections::HashMap;

use thiserror::Error;

use super::AtomRecord;
use crate::elements::Element;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PdbError {
    #[error("pocket has no ATOM records")]
    EmptyPocket,
    #[error("line {line}: unparsable coordinate field '{field}'")]
    Coordinate { line: usize, field: String },
    #[error("line {line}: cannot determine element for atom '{name}'")]
    Element { line: usize, name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AminoAcid {
    Ala,
    Arg,
    Asn,
    Asp,
    Cys,
    Gln,
    Glu,
    Gly,
    His,
    Ile,
    Leu,
    Lys,
    Met,
    Phe,
    Pro,
    Ser,
    Thr,
    Trp,
    Tyr,
    Val,
    Unknown,
}

impl AminoAcid {
    pub fn from_code(code: &str) -> AminoAcid {
        use AminoAcid::*;
        match code.trim().to_ascii_uppercase().as_str() {
            "ALA" => Ala,
            "ARG" => Arg,
            "ASN" => Asn,
            "ASP" => Asp,
            "CYS" | "CYX" => Cys,
            "GLN" => Gln,
            "GLU" => Glu,
            "GLY" => Gly,
            "HIS" | "HID" | "HIE" | "HIP" => His,
            "ILE" => Ile,
            "LEU" => Leu,
            "LYS" => Lys,
            "MET" => Met,
            "PHE" => Phe,
            "PRO" => Pro,
            "SER" => Ser,
            "THR" => Thr,
            "TRP" => Trp,
            "TYR" => Tyr,
            "VAL" => Val,
            _ => Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residue {
    pub chain: char,
    pub seq: i32,
    pub insertion: char,
    pub name: String,
    pub amino_acid: AminoAcid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PocketStructure {
    pub name: String,
    pub atoms: Vec<AtomRecord>,
    /// PDB atom names (e.g. "CA", "OG1"), aligned with `atoms`.
    pub atom_names: Vec<String>,
    pub residue_of: Vec<usize>,
    pub residues: Vec<Residue>,
}

impl PocketStructure {
    /// Builds a pocket from residues given as (residue name, named atoms),
    /// numbered 1.. on chain A.
    pub fn from_residues(name: &str, residues: Vec<(&str, Vec<(&str, AtomRecord)>)>) -> PocketStructure {
        let mut p = PocketStructure {
            name: name.to_string(),
            atoms: Vec::new(),
            atom_names: Vec::new(),
            residue_of: Vec::new(),
            residues: Vec::new(),
        };
        for (k, (res_name, atoms)) in residues.into_iter().enumerate() {
            for (atom_name, atom) in atoms {
                p.atoms.push(atom);
                p.atom_names.push(atom_name.to_string());
                p.residue_of.push(k);
            }
            p.residues.push(Residue {
                chain: 'A',
                seq: k as i32 + 1,
                insertion: ' ',
                name: res_name.to_string(),
                amino_acid: AminoAcid::from_code(res_name),
            });
        }
        p
    }

    /// All atoms in one unknown residue, named by element.
    pub fn from_atoms(name: &str, atoms: Vec<AtomRecord>) -> PocketStructure {
        let named = atoms.into_iter().map(|a| (a.element.symbol(), a)).collect();
        Self::from_residues(name, vec![("UNK", named)])
    }

    pub fn amino_acid_of(&self, residue: usize) -> AminoAcid {
        self.residues[residue].amino_acid
    }

    pub fn residue_name_of_atom(&self, atom: usize) -> &str {
        &self.residues[self.residue_of[atom]].name
    }

    pub fn heavy_atom_indices(&self) -> Vec<usize> {
        (0..self.atoms.len())
            .filter(|&i| !self.atoms[i].element.is_hydrogen())
            .collect()
    }
}

fn column(line: &str, start: usize, end: usize) -> &str {
    let end = end.min(line.len());
    if start >= end {
        return "";
    }
    line.get(start..end).unwrap_or("")
}

fn column_char(line: &str, idx: usize) -> char {
    line.as_bytes().get(idx).map(|&b| b as char).unwrap_or(' ')
}

/// Element from the atom-name field when columns 77-78 are blank.
fn element_from_name(raw_name: &str) -> Option<Element> {
    // Names starting in column 13 are either two-letter elements ("FE")
    // or four-character hydrogen names ("HG12"); names starting in
    // column 14 carry a one-letter element.
    let starts_col13 = raw_name.starts_with(|c: char| c.is_ascii_alphabetic());
    let letters: String = raw_name
        .chars()
        .skip_while(|c| c.is_ascii_digit() || *c == ' ')
        .take_while(|c| c.is_ascii_alphabetic())
        .collect();
    if letters.is_empty() {
        return None;
    }
    if raw_name.starts_with(|c: char| c.is_ascii_digit()) || letters.starts_with('H') {
        return Some(Element::H);
    }
    if starts_col13 && letters.len() >= 2 {
        if let Some(e) = Element::from_symbol(&letters[..2]) {
            return Some(e);
        }
    }
    Element::from_symbol(&letters[..1])
}

/// Parses ATOM records into a pocket. HETATM records (ligands, waters,
/// metals) are ignored; only altloc ' ' and 'A' are kept.
pub fn parse_pdb_pocket(bytes: &[u8]) -> Result<PocketStructure, PdbError> {
    let text = String::from_utf8_lossy(bytes);
    let mut atoms = Vec::new();
    let mut atom_names = Vec::new();
    let mut residue_of = Vec::new();
    let mut residues: Vec<Residue> = Vec::new();
    let mut residue_index: HashMap<(char, i32, char), usize> = HashMap::new();
    let mut name = String::new();

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.starts_with("HEADER") && name.is_empty() {
            name = column(line, 62, 66).trim().to_string();
        }
        if !line.starts_with("ATOM") {
            continue;
        }
        let altloc = column_char(line, 16);
        if altloc != ' ' && altloc != 'A' {
            continue;
        }
        let mut pos = [0.0f64; 3];
        for (k, (s, e)) in [(30, 38), (38, 46), (46, 54)].into_iter().enumerate() {
            let f = column(line, s, e).trim();
            pos[k] = f.parse().map_err(|_| PdbError::Coordinate {
                line: lineno + 1,
                field: f.to_string(),
            })?;
            if !pos[k].is_finite() {
                return Err(PdbError::Coordinate {
                    line: lineno + 1,
                    field: f.to_string(),
                });
            }
        }
        let raw_name = column(line, 12, 16);
        let element = Element::from_symbol(column(line, 76, 78).trim())
            .filter(|_| !column(line, 76, 78).trim().is_empty())
            .or_else(|| element_from_name(raw_name))
            .ok_or_else(|| PdbError::Element {
                line: lineno + 1,
                name: raw_name.trim().to_string(),
            })?;
        let charge = parse_charge(column(line, 78, 80));
        let chain = column_char(line, 21);
        let seq: i32 = column(line, 22, 26).trim().parse().unwrap_or(0);
        let insertion = column_char(line, 26);
        let res_name = column(line, 17, 20).trim().to_string();
        let key = (chain, seq, insertion);
        let idx = *residue_index.entry(key).or_insert_with(|| {
            residues.push(Residue {
                chain,
                seq,
                insertion,
                amino_acid: AminoAcid::from_code(&res_name),
                name: res_name.clone(),
            });
            residues.len() - 1
        });
        atoms.push(AtomRecord {
            element,
            position: pos,
            formal_charge: charge,
        });
        atom_names.push(raw_name.trim().to_string());
        residue_of.push(idx);
    }
    if atoms.is_empty() {
        return Err(PdbError::EmptyPocket);
    }
    Ok(PocketStructure {
        name,
        atoms,
        atom_names,
        residue_of,
        residues,
    })
}

fn parse_charge(field: &str) -> i8 {
    let f = field.trim();
    if f.len() != 2 {
        return 0;
    }
    let (digit, sign) = (f.as_bytes()[0], f.as_bytes()[1]);
    if !digit.is_ascii_digit() {
        return 0;
    }
    let v = (digit - b'0') as i8;
    match sign {
        b'+' => v,
        b'-' => -v,
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom_line(serial: usize, name: &str, res: &str, chain: char, seq: i32, x: f64, elem: &str) -> String {
        format!(
            "ATOM  {serial:5} {name:<4} {res:>3} {chain}{seq:4}    {x:8.3}{:8.3}{:8.3}  1.00  0.00          {elem:>2}",
            0.0, 0.0
        )
    }

    #[test]
    fn glycine_three_atoms() {
        let text = [
            atom_line(1, " N", "GLY", 'A', 1, 0.0, "N"),
            atom_line(2, " CA", "GLY", 'A', 1, 1.45, "C"),
            atom_line(3, " C", "GLY", 'A', 1, 2.9, "C"),
        ]
        .join("\n");
        let p = parse_pdb_pocket(text.as_bytes()).unwrap();
        assert_eq!(p.atoms.len(), 3);
        assert_eq!(p.residues.len(), 1);
        assert_eq!(p.amino_acid_of(0), AminoAcid::Gly);
        assert_eq!(p.atom_names[1], "CA");
    }

    #[test]
    fn water_only_is_empty() {
        let text = "HETATM    1  O   HOH A   1       0.000   0.000   0.000  1.00  0.00           O\n";
        assert_eq!(parse_pdb_pocket(text.as_bytes()), Err(PdbError::EmptyPocket));
    }

    #[test]
    fn chains_not_merged() {
        let text = [
            atom_line(1, " CA", "ALA", 'A', 10, 0.0, "C"),
            atom_line(2, " CA", "ALA", 'B', 10, 5.0, "C"),
        ]
        .join("\n");
        let p = parse_pdb_pocket(text.as_bytes()).unwrap();
        assert_eq!(p.residues.len(), 2);
        assert_eq!(p.residue_of, vec![0, 1]);
    }

    #[test]
    fn element_fallback_from_name() {
        let mut line = atom_line(1, " CA", "ALA", 'A', 1, 0.0, "");
        line.truncate(66);
        let p = parse_pdb_pocket(line.as_bytes()).unwrap();
        assert_eq!(p.atoms[0].element, Element::C);
        let mut hline = atom_line(1, "HG12", "VAL", 'A', 1, 0.0, "");
        hline.truncate(66);
        let p = parse_pdb_pocket(hline.as_bytes()).unwrap();
        assert_eq!(p.atoms[0].element, Element::H);
    }

    #[test]
    fn altloc_b_dropped() {
        let mut l1 = atom_line(1, " CA", "SER", 'A', 1, 0.0, "C");
        let mut l2 = atom_line(2, " CA", "SER", 'A', 1, 0.3, "C");
        l1.replace_range(16..17, "A");
        l2.replace_range(16..17, "B");
        let p = parse_pdb_pocket(format!("{l1}\n{l2}").as_bytes()).unwrap();
        assert_eq!(p.atoms.len(), 1);
    }

    #[test]
    fn bad_coordinate_reports_line() {
        let mut l = atom_line(1, " CA", "SER", 'A', 1, 0.0, "C");
        l.replace_range(30..38, "   x.xxx");
        let err = parse_pdb_pocket(l.as_bytes()).unwrap_err();
        assert!(matches!(err, PdbError::Coordinate { line: 1, .. }));
    }
}
