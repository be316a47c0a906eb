//! Wildman-Crippen logP by atom typing. Every atom, hydrogens included,
//! takes the type of the first table row whose pattern matches with the
//! atom as root.

use std::sync::OnceLock;

use serde::Deserialize;

use crate::chemgraph::smarts::{MatchGraph, Smarts};
use crate::chemgraph::Perceived;

const TABLE_CSV: &str = include_str!("../../data/crippen.csv");

#[derive(Debug, Clone)]
pub struct CrippenType {
    pub label: String,
    pub pattern: Smarts,
    pub logp: f64,
}

#[derive(Deserialize)]
struct Row {
    #[serde(rename = "type")]
    label: String,
    smarts: String,
    logp: f64,
}

pub fn crippen_table() -> &'static [CrippenType] {
    static TABLE: OnceLock<Vec<CrippenType>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(TABLE_CSV.as_bytes());
        rdr.deserialize::<Row>()
            .map(|r| {
                let r = r.expect("bundled Crippen table parses");
                CrippenType {
                    pattern: Smarts::parse(&r.smarts).expect("bundled Crippen pattern parses"),
                    label: r.label,
                    logp: r.logp,
                }
            })
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrippenResult {
    pub logp: f64,
    /// Type label per atom of the hydrogen-expanded graph (heavy atoms
    /// first, in perceived order); `None` for untyped atoms.
    pub types: Vec<Option<&'static str>>,
    pub warnings: Vec<String>,
}

pub fn crippen_contributions(p: &Perceived) -> CrippenResult {
    let g = MatchGraph::with_explicit_hydrogens(p);
    let table = crippen_table();
    let mut logp = 0.0;
    let mut types = Vec::with_capacity(g.len());
    let mut warnings = Vec::new();
    for i in 0..g.len() {
        match table.iter().find(|t| t.pattern.matches_at(&g, i)) {
            Some(t) => {
                logp += t.logp;
                types.push(Some(t.label.as_str()));
            }
            None => {
                warnings.push(format!("atom {i} (Z={}) has no logP type; contributes 0", g.number[i]));
                types.push(None);
            }
        }
    }
    CrippenResult { logp, types, warnings }
}

pub fn crippen_logp(p: &Perceived) -> f64 {
    crippen_contributions(p).logp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemgraph::perceive;
    use crate::elements::Element;
    use crate::structio::{AtomRecord, BondOrder, BondRecord, MoleculeGraph};

    fn mol(symbols: &[&str], bonds: &[(usize, usize, BondOrder)]) -> Perceived {
        let atoms = symbols
            .iter()
            .enumerate()
            .map(|(i, s)| AtomRecord::new(Element::from_symbol(s).unwrap(), [i as f64, 0.0, 0.0]))
            .collect();
        let bonds = bonds.iter().map(|&(a, b, o)| BondRecord::new(a, b, o)).collect();
        perceive(&MoleculeGraph::new("t", atoms, bonds).unwrap())
    }

    #[test]
    fn table_loads() {
        let t = crippen_table();
        assert_eq!(t.len(), 110);
        assert_eq!(t[0].label, "C1");
    }

    #[test]
    fn methane() {
        let r = crippen_contributions(&mol(&["C"], &[]));
        assert!((r.logp - 0.6361).abs() < 1e-9);
        assert_eq!(r.types, vec![Some("C1"), Some("H1"), Some("H1"), Some("H1"), Some("H1")]);
    }

    #[test]
    fn toluene_above_benzene() {
        use BondOrder::*;
        let ring = [(0, 1, Double), (1, 2, Single), (2, 3, Double), (3, 4, Single), (4, 5, Double), (5, 0, Single)];
        let benzene = crippen_logp(&mol(&["C"; 6], &ring));
        let mut tb = ring.to_vec();
        tb.push((0, 6, Single));
        let toluene = crippen_logp(&mol(&["C"; 7], &tb));
        assert!((benzene - 1.6866).abs() < 1e-9);
        assert!((toluene - 1.99502).abs() < 1e-9);
    }

    #[test]
    fn additive_over_components() {
        let one = crippen_logp(&mol(&["C", "O"], &[(0, 1, BondOrder::Single)]));
        let two = crippen_logp(&mol(&["C", "O", "C", "O"], &[(0, 1, BondOrder::Single), (2, 3, BondOrder::Single)]));
        assert!((two - 2.0 * one).abs() < 1e-12);
    }
}
