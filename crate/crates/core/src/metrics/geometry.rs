//! Bond-length and bond-angle histograms per bond/angle type and their JSD
//! against reference molecules.
//!
//! Keys use the input (Kekule) bond orders: a bond key is the two element
//! symbols in sorted order joined by the order symbol (`C-N`, `C=O`); an
//! angle key is `A-B=C` for the path A-B-C, written in whichever direction
//! sorts first, so `O=C-N` and `N-C=O` are the same key.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::distribution::{jsd_vectors, JsdConvention};
use crate::geom::{angle_deg, dist};
use crate::structio::{BondOrder, MoleculeGraph};

pub const BOND_KEYS: [&str; 6] = ["C-C", "C-N", "C-O", "C=C", "C=N", "C=O"];

/// The reported angle types; some are the same key written twice, and the
/// headline mean counts them twice.
pub const ANGLE_KEYS: [&str; 24] = [
    "C#C-C", "C-C#N", "C-C-C", "C-C-N", "C-C-O", "C-C=C", "C-C=N", "C-N-C", "C-N-N", "C-N-O", "C-N=C", "C-N=N",
    "C-O-C", "C-O-N", "C=C-N", "C=C=C", "N#C-C", "N-C-N", "N-C-O", "N-C=N", "N-C=O", "N-N-O", "N=C-N", "O=C-N",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistogramKind {
    BondLength,
    BondAngle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Binning {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl Binning {
    pub const BOND_LENGTH: Binning = Binning { lo: 0.8, hi: 2.0, bins: 60 };
    pub const BOND_ANGLE: Binning = Binning { lo: 0.0, hi: 180.0, bins: 90 };

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    /// Bin of `x`; values outside the range go to the edge bins.
    pub fn index(&self, x: f64) -> usize {
        // the epsilon keeps values printed on an edge (1.52) in the upper bin
        let k = ((x - self.lo) / self.width() + 1e-9).floor();
        if k < 0.0 {
            0
        } else {
            (k as usize).min(self.bins - 1)
        }
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.bins).map(|k| self.lo + k as f64 * self.width()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryHistogram {
    pub kind: HistogramKind,
    pub key: String,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl GeometryHistogram {
    pub fn new(kind: HistogramKind, key: &str) -> Self {
        let binning = match kind {
            HistogramKind::BondLength => Binning::BOND_LENGTH,
            HistogramKind::BondAngle => Binning::BOND_ANGLE,
        };
        Self::with_binning(kind, key, binning)
    }

    pub fn with_binning(kind: HistogramKind, key: &str, binning: Binning) -> Self {
        GeometryHistogram {
            kind,
            key: key.to_string(),
            bin_edges: binning.edges(),
            counts: vec![0; binning.bins],
        }
    }

    fn binning(&self) -> Binning {
        Binning {
            lo: self.bin_edges[0],
            hi: *self.bin_edges.last().expect("at least one edge"),
            bins: self.counts.len(),
        }
    }

    pub fn add(&mut self, value: f64) {
        let k = self.binning().index(value);
        self.counts[k] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    pub fn merge(&mut self, other: &GeometryHistogram) -> Result<(), GeometryError> {
        if self.kind != other.kind || self.bin_edges != other.bin_edges {
            return Err(GeometryError::Binning(self.key.clone()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("histograms for '{0}' use different binning")]
    Binning(String),
    #[error("histogram for '{0}' is empty")]
    Empty(String),
}

pub fn bond_key(a: &str, b: &str, order: BondOrder) -> String {
    let (x, y) = if a <= b { (a, b) } else { (b, a) };
    format!("{x}{}{y}", order.symbol())
}

pub fn angle_key(a: &str, b: &str, c: &str, ab: BondOrder, bc: BondOrder) -> String {
    let fwd = format!("{a}{}{b}{}{c}", ab.symbol(), bc.symbol());
    let rev = format!("{c}{}{b}{}{a}", bc.symbol(), ab.symbol());
    fwd.min(rev)
}

/// Canonical form of a printed angle key such as `O=C-N`.
pub fn canonical_angle_key(key: &str) -> String {
    let rev: String = key.chars().rev().collect();
    // element symbols here are single letters, so reversing the text reverses the path
    key.to_string().min(rev)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryBins {
    pub bond_length: Binning,
    pub bond_angle: Binning,
}

impl Default for GeometryBins {
    fn default() -> Self {
        GeometryBins {
            bond_length: Binning::BOND_LENGTH,
            bond_angle: Binning::BOND_ANGLE,
        }
    }
}

/// Bond lengths per key, for the keys in `BOND_KEYS`.
pub fn bond_length_histograms(mols: &[MoleculeGraph]) -> BTreeMap<String, GeometryHistogram> {
    bond_length_histograms_with(mols, Binning::BOND_LENGTH)
}

pub fn bond_length_histograms_with(mols: &[MoleculeGraph], binning: Binning) -> BTreeMap<String, GeometryHistogram> {
    let mut out: BTreeMap<String, GeometryHistogram> = BOND_KEYS
        .iter()
        .map(|k| (k.to_string(), GeometryHistogram::with_binning(HistogramKind::BondLength, k, binning)))
        .collect();
    for m in mols {
        for b in &m.bonds {
            let (ea, eb) = (m.atoms[b.a].element, m.atoms[b.b].element);
            if ea.is_hydrogen() || eb.is_hydrogen() {
                continue;
            }
            let key = bond_key(ea.symbol(), eb.symbol(), b.order);
            if let Some(h) = out.get_mut(&key) {
                h.add(dist(m.atoms[b.a].position, m.atoms[b.b].position));
            }
        }
    }
    out
}

/// Angles per canonical key, for the distinct keys in `ANGLE_KEYS`.
pub fn bond_angle_histograms(mols: &[MoleculeGraph]) -> BTreeMap<String, GeometryHistogram> {
    bond_angle_histograms_with(mols, Binning::BOND_ANGLE)
}

pub fn bond_angle_histograms_with(mols: &[MoleculeGraph], binning: Binning) -> BTreeMap<String, GeometryHistogram> {
    let mut out: BTreeMap<String, GeometryHistogram> = BTreeMap::new();
    for k in ANGLE_KEYS {
        let c = canonical_angle_key(k);
        out.entry(c.clone())
            .or_insert_with(|| GeometryHistogram::with_binning(HistogramKind::BondAngle, &c, binning));
    }
    for m in mols {
        let adj = m.adjacency();
        for (j, nbrs) in adj.iter().enumerate() {
            if m.atoms[j].element.is_hydrogen() {
                continue;
            }
            for x in 0..nbrs.len() {
                for y in x + 1..nbrs.len() {
                    let (i, bi) = nbrs[x];
                    let (k, bk) = nbrs[y];
                    if m.atoms[i].element.is_hydrogen() || m.atoms[k].element.is_hydrogen() {
                        continue;
                    }
                    let key = angle_key(
                        m.atoms[i].element.symbol(),
                        m.atoms[j].element.symbol(),
                        m.atoms[k].element.symbol(),
                        m.bonds[bi].order,
                        m.bonds[bk].order,
                    );
                    if let Some(h) = out.get_mut(&key) {
                        h.add(angle_deg(m.atoms[i].position, m.atoms[j].position, m.atoms[k].position));
                    }
                }
            }
        }
    }
    out
}

pub fn geometry_jsd(
    gen: &GeometryHistogram,
    reference: &GeometryHistogram,
    convention: JsdConvention,
) -> Result<f64, GeometryError> {
    if gen.kind != reference.kind || gen.bin_edges != reference.bin_edges {
        return Err(GeometryError::Binning(gen.key.clone()));
    }
    let p: Vec<f64> = gen.counts.iter().map(|&c| c as f64).collect();
    let q: Vec<f64> = reference.counts.iter().map(|&c| c as f64).collect();
    jsd_vectors(&p, &q, convention).ok_or_else(|| GeometryError::Empty(gen.key.clone()))
}

/// Per-key JSD for `keys` (canonicalized through `canon`); keys where either
/// side is empty are absent.
fn per_key(
    gen: &BTreeMap<String, GeometryHistogram>,
    reference: &BTreeMap<String, GeometryHistogram>,
    keys: &[&str],
    canon: fn(&str) -> String,
    convention: JsdConvention,
) -> Vec<(String, Option<f64>)> {
    keys.iter()
        .map(|k| {
            let c = canon(k);
            let v = match (gen.get(&c), reference.get(&c)) {
                (Some(g), Some(r)) => geometry_jsd(g, r, convention).ok(),
                _ => None,
            };
            (k.to_string(), v)
        })
        .collect()
}

/// Unweighted mean over present values; `None` when all are absent.
pub fn headline_mean(values: &[Option<f64>]) -> Option<f64> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryJsd {
    pub bond_length: Vec<(String, Option<f64>)>,
    pub bond_angle: Vec<(String, Option<f64>)>,
    pub jsd_bl: Option<f64>,
    pub jsd_ba: Option<f64>,
}

pub fn geometry_jsd_metrics(
    gen: &[MoleculeGraph],
    reference: &[MoleculeGraph],
    convention: JsdConvention,
    warnings: &mut Vec<String>,
) -> GeometryJsd {
    geometry_jsd_metrics_with(gen, reference, convention, &GeometryBins::default(), warnings)
}

pub fn geometry_jsd_metrics_with(
    gen: &[MoleculeGraph],
    reference: &[MoleculeGraph],
    convention: JsdConvention,
    bins: &GeometryBins,
    warnings: &mut Vec<String>,
) -> GeometryJsd {
    let bond_length = per_key(
        &bond_length_histograms_with(gen, bins.bond_length),
        &bond_length_histograms_with(reference, bins.bond_length),
        &BOND_KEYS,
        |k| k.to_string(),
        convention,
    );
    let bond_angle = per_key(
        &bond_angle_histograms_with(gen, bins.bond_angle),
        &bond_angle_histograms_with(reference, bins.bond_angle),
        &ANGLE_KEYS,
        canonical_angle_key,
        convention,
    );
    for (k, v) in bond_length.iter().chain(&bond_angle) {
        if v.is_none() {
            warnings.push(format!("geometry key {k}: empty histogram, excluded from the mean"));
        }
    }
    let bl: Vec<Option<f64>> = bond_length.iter().map(|x| x.1).collect();
    let ba: Vec<Option<f64>> = bond_angle.iter().map(|x| x.1).collect();
    GeometryJsd {
        jsd_bl: headline_mean(&bl),
        jsd_ba: headline_mean(&ba),
        bond_length,
        bond_angle,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::Element;
    use crate::structio::{AtomRecord, BondRecord};

    fn mol(atoms: &[(&str, [f64; 3])], bonds: &[(usize, usize, BondOrder)]) -> MoleculeGraph {
        MoleculeGraph::new(
            "g",
            atoms.iter().map(|(s, p)| AtomRecord::new(Element::from_symbol(s).unwrap(), *p)).collect(),
            bonds.iter().map(|&(a, b, o)| BondRecord::new(a, b, o)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn cc_bond_lands_in_its_bin() {
        let m = mol(&[("C", [0.0; 3]), ("C", [1.52, 0.0, 0.0])], &[(0, 1, BondOrder::Single)]);
        let h = &bond_length_histograms(&[m])["C-C"];
        let k = Binning::BOND_LENGTH.index(1.52);
        assert_eq!(h.counts[k], 1);
        assert!((h.bin_edges[k] - 1.52).abs() < 1e-9);
        assert!(h.bin_edges[k + 1] > 1.52);
    }

    #[test]
    fn ethene_and_missing_keys() {
        let m = mol(&[("C", [0.0; 3]), ("C", [1.33, 0.0, 0.0])], &[(0, 1, BondOrder::Double)]);
        let h = bond_length_histograms(&[m]);
        assert_eq!(h["C=C"].counts[Binning::BOND_LENGTH.index(1.33)], 1);
        assert!(h["C=N"].is_empty());
    }

    #[test]
    fn out_of_range_values_clamp() {
        let b = Binning::BOND_LENGTH;
        assert_eq!(b.index(0.1), 0);
        assert_eq!(b.index(3.0), b.bins - 1);
    }

    #[test]
    fn linear_chain_in_last_angle_bin() {
        let m = mol(
            &[("C", [0.0; 3]), ("C", [1.5, 0.0, 0.0]), ("C", [3.0, 0.0, 0.0])],
            &[(0, 1, BondOrder::Single), (1, 2, BondOrder::Single)],
        );
        let h = &bond_angle_histograms(&[m])["C-C-C"];
        assert_eq!(h.counts[89], 1);
    }

    #[test]
    fn tetrahedral_center_gives_six_angles() {
        let s = 1.09 / 3f64.sqrt();
        let m = mol(
            &[
                ("C", [0.0; 3]),
                ("C", [s, s, s]),
                ("C", [s, -s, -s]),
                ("C", [-s, s, -s]),
                ("C", [-s, -s, s]),
            ],
            &[
                (0, 1, BondOrder::Single),
                (0, 2, BondOrder::Single),
                (0, 3, BondOrder::Single),
                (0, 4, BondOrder::Single),
            ],
        );
        let h = &bond_angle_histograms(&[m])["C-C-C"];
        assert_eq!(h.total(), 6);
        assert_eq!(h.counts[Binning::BOND_ANGLE.index(109.47)], 6);
    }

    #[test]
    fn benzene_angles_at_120() {
        let atoms: Vec<(&str, [f64; 3])> = (0..6)
            .map(|i| {
                let t = i as f64 * std::f64::consts::PI / 3.0;
                ("C", [1.39 * t.cos(), 1.39 * t.sin(), 0.0])
            })
            .collect();
        let bonds: Vec<(usize, usize, BondOrder)> = (0..6)
            .map(|i| (i, (i + 1) % 6, if i % 2 == 0 { BondOrder::Double } else { BondOrder::Single }))
            .collect();
        let h = &bond_angle_histograms(&[mol(&atoms, &bonds)])["C-C=C"];
        assert_eq!(h.total(), 6);
        assert_eq!(h.counts[Binning::BOND_ANGLE.index(120.0)], 6);
    }

    #[test]
    fn angle_keys_canonicalize() {
        assert_eq!(canonical_angle_key("O=C-N"), canonical_angle_key("N-C=O"));
        assert_eq!(canonical_angle_key("N#C-C"), "C-C#N");
        let distinct: std::collections::BTreeSet<String> = ANGLE_KEYS.iter().map(|k| canonical_angle_key(k)).collect();
        assert_eq!(distinct.len(), 21);
        assert_eq!(
            angle_key("O", "C", "N", BondOrder::Double, BondOrder::Single),
            canonical_angle_key("O=C-N")
        );
    }

    #[test]
    fn jsd_identity_and_disjoint() {
        let mut a = GeometryHistogram::new(HistogramKind::BondLength, "C-C");
        let mut b = a.clone();
        a.add(1.0);
        b.add(1.5);
        assert_eq!(geometry_jsd(&a, &a, JsdConvention::Base2).unwrap(), 0.0);
        assert!((geometry_jsd(&a, &b, JsdConvention::Base2).unwrap() - 1.0).abs() < 1e-12);
        let c = GeometryHistogram::new(HistogramKind::BondAngle, "C-C");
        assert!(matches!(
            geometry_jsd(&a, &c, JsdConvention::Base2),
            Err(GeometryError::Binning(_))
        ));
    }
}
