//! Heavy-atom view of a molecule with hydrogen counts, rings and aromaticity.
//!
//! Aromaticity: a ring (or a pair of fused rings taken as one envelope) is
//! aromatic when every atom donates a defined number of pi electrons and
//! the total is 4n+2, or when all its input bonds are already aromatic.
//! Donations: 1 for an atom with a double bond inside the ring system,
//! 0 for an exocyclic double bond to a heteroatom, 2 for a neutral
//! pyrrole-type N/P, an ether-type O/S/Se or a carbanion.

use super::rings::find_rings;
use crate::elements::Element;
use crate::structio::{BondOrder, MoleculeGraph};

#[derive(Debug, Clone)]
pub struct Perceived {
    /// Heavy-atom subgraph; bond orders as given in the input.
    pub graph: MoleculeGraph,
    /// Heavy index to index in the input molecule.
    pub original_index: Vec<usize>,
    /// Total hydrogens (explicit neighbors plus valence-implied).
    pub hydrogens: Vec<u8>,
    pub aromatic_atom: Vec<bool>,
    pub aromatic_bond: Vec<bool>,
    pub rings: Vec<Vec<usize>>,
    pub aromatic_ring: Vec<bool>,
    pub ring_atom: Vec<bool>,
    pub ring_bond: Vec<bool>,
    pub adjacency: Vec<Vec<(usize, usize)>>,
}

impl Perceived {
    pub fn len(&self) -> usize {
        self.graph.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.atoms.is_empty()
    }

    pub fn element(&self, i: usize) -> Element {
        self.graph.atoms[i].element
    }

    pub fn charge(&self, i: usize) -> i8 {
        self.graph.atoms[i].formal_charge
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Bond type seen by pattern matching: aromatic when perceived so,
    /// otherwise the input order.
    pub fn bond_kind(&self, bond: usize) -> BondOrder {
        if self.aromatic_bond[bond] {
            BondOrder::Aromatic
        } else {
            self.graph.bonds[bond].order
        }
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a].iter().find(|&&(w, _)| w == b).map(|&(_, k)| k)
    }

    pub fn aromatic_rings(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.rings
            .iter()
            .zip(&self.aromatic_ring)
            .filter(|(_, &a)| a)
            .map(|(r, _)| r)
    }
}

fn implicit_hydrogens(mol: &MoleculeGraph, adj: &[Vec<(usize, usize)>], i: usize) -> u8 {
    let atom = &mol.atoms[i];
    let mut used: u16 = 0;
    let mut aromatic = 0u16;
    for &(_, k) in &adj[i] {
        match mol.bonds[k].order {
            BondOrder::Aromatic => aromatic += 1,
            o => used += u16::from(o.valence()),
        }
    }
    if aromatic > 0 {
        // aromatic input bonds: only C and N get implied hydrogens
        let charge = i16::from(atom.formal_charge);
        let base: i16 = match atom.element.number() {
            6 => 4 - charge.abs(),
            7 => 3 + charge,
            _ => return 0,
        };
        let taken = (used + aromatic + u16::from(aromatic >= 2)) as i16;
        return (base - taken).max(0) as u8;
    }
    atom.element
        .charged_valences(atom.formal_charge)
        .iter()
        .map(|&v| u16::from(v))
        .find(|&v| v >= used)
        .map_or(0, |v| (v - used) as u8)
}

/// Pi-electron donation of heavy atom `i` to a ring system, or `None`
/// when the atom cannot be part of an aromatic ring.
fn pi_donation(p: &Perceived, i: usize) -> Option<u8> {
    let mut ring_double = false;
    let mut exo_hetero_double = false;
    for &(w, k) in &p.adjacency[i] {
        match p.graph.bonds[k].order {
            BondOrder::Double => {
                if p.ring_bond[k] {
                    ring_double = true;
                } else if p.element(w) != Element::C {
                    exo_hetero_double = true;
                } else {
                    return None;
                }
            }
            BondOrder::Triple => return None,
            _ => {}
        }
    }
    if ring_double {
        return Some(1);
    }
    if exo_hetero_double {
        return Some(0);
    }
    let charge = p.charge(i);
    match p.element(i).number() {
        7 | 15 if charge == 0 && p.degree(i) + usize::from(p.hydrogens[i]) <= 3 => Some(2),
        8 | 16 | 34 if charge == 0 && p.degree(i) == 2 => Some(2),
        6 if charge == -1 => Some(2),
        6 if charge == 1 => Some(0),
        _ => None,
    }
}

fn is_4n2(total: u32) -> bool {
    total >= 2 && (total - 2) % 4 == 0
}

pub fn perceive(mol: &MoleculeGraph) -> Perceived {
    let full_adj = mol.adjacency();
    let (graph, original_index) = mol.heavy_subgraph();
    let n = graph.atoms.len();
    let mut hydrogens = vec![0u8; n];
    for (h, &orig) in original_index.iter().enumerate() {
        let explicit = full_adj[orig]
            .iter()
            .filter(|&&(w, _)| mol.atoms[w].element.is_hydrogen())
            .count() as u8;
        hydrogens[h] = explicit + implicit_hydrogens(mol, &full_adj, orig);
    }
    let adjacency = graph.adjacency();
    let rings = find_rings(&graph);
    let mut ring_atom = vec![false; n];
    let mut ring_bond = vec![false; graph.bonds.len()];
    for r in &rings {
        for (x, &a) in r.iter().enumerate() {
            ring_atom[a] = true;
            let b = r[(x + 1) % r.len()];
            if let Some(&(_, k)) = adjacency[a].iter().find(|&&(w, _)| w == b) {
                ring_bond[k] = true;
            }
        }
    }
    let mut p = Perceived {
        aromatic_atom: vec![false; n],
        aromatic_bond: vec![false; graph.bonds.len()],
        aromatic_ring: vec![false; rings.len()],
        graph,
        original_index,
        hydrogens,
        rings,
        ring_atom,
        ring_bond,
        adjacency,
    };
    let ring_bonds: Vec<Vec<usize>> = p
        .rings
        .iter()
        .map(|r| {
            (0..r.len())
                .filter_map(|x| p.bond_between(r[x], r[(x + 1) % r.len()]))
                .collect()
        })
        .collect();
    let donation: Vec<Option<u8>> = (0..n).map(|i| pi_donation(&p, i)).collect();
    let sum = |atoms: &mut dyn Iterator<Item = usize>| -> Option<u32> {
        atoms.map(|a| donation[a].map(u32::from)).sum()
    };
    for (ri, r) in p.rings.iter().enumerate() {
        let all_aromatic_input = ring_bonds[ri]
            .iter()
            .all(|&k| p.graph.bonds[k].order == BondOrder::Aromatic);
        let electrons = sum(&mut r.iter().copied());
        p.aromatic_ring[ri] = all_aromatic_input || electrons.is_some_and(is_4n2);
    }
    // fused envelopes of two rings sharing a bond
    for ri in 0..p.rings.len() {
        for rj in ri + 1..p.rings.len() {
            if p.aromatic_ring[ri] && p.aromatic_ring[rj] {
                continue;
            }
            if !ring_bonds[ri].iter().any(|k| ring_bonds[rj].contains(k)) {
                continue;
            }
            let mut union: Vec<usize> = p.rings[ri].iter().chain(&p.rings[rj]).copied().collect();
            union.sort_unstable();
            union.dedup();
            if sum(&mut union.into_iter()).is_some_and(is_4n2) {
                p.aromatic_ring[ri] = true;
                p.aromatic_ring[rj] = true;
            }
        }
    }
    for (ri, r) in p.rings.iter().enumerate() {
        if !p.aromatic_ring[ri] {
            continue;
        }
        for &a in r {
            p.aromatic_atom[a] = true;
        }
        for &k in &ring_bonds[ri] {
            p.aromatic_bond[k] = true;
        }
    }
    p
}

/// Rotatable bonds: single, non-ring, both ends with heavy degree >= 2,
/// excluding amide C-N.
pub fn rotatable_bond_count(p: &Perceived) -> usize {
    let is_carbonyl_c = |c: usize| {
        p.element(c) == Element::C
            && p.adjacency[c].iter().any(|&(w, k)| {
                p.element(w) == Element::O && p.graph.bonds[k].order == BondOrder::Double
            })
    };
    p.graph
        .bonds
        .iter()
        .enumerate()
        .filter(|(k, b)| {
            if b.order != BondOrder::Single || p.ring_bond[*k] || p.aromatic_bond[*k] {
                return false;
            }
            if p.degree(b.a) < 2 || p.degree(b.b) < 2 {
                return false;
            }
            let amide = (p.element(b.a) == Element::N && is_carbonyl_c(b.b))
                || (p.element(b.b) == Element::N && is_carbonyl_c(b.a));
            !amide
        })
        .count()
}
