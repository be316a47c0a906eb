//! Molecular structure types, SDF/PDB readers and report serialization.

mod pdb;
mod report;
mod sdf;

pub use pdb::{parse_pdb_pocket, AminoAcid, PdbError, PocketStructure, Residue};
pub use report::{write_report, MetricReport, ReportError, ReportFormat};
pub use sdf::{parse_sdf, write_sdf, SdfError};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elements::Element;
use crate::geom::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomRecord {
    pub element: Element,
    pub position: Vec3,
    pub formal_charge: i8,
}

impl AtomRecord {
    pub fn new(element: Element, position: Vec3) -> Self {
        AtomRecord {
            element,
            position,
            formal_charge: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Symbol used in bond and angle keys.
    pub fn symbol(self) -> char {
        match self {
            BondOrder::Single => '-',
            BondOrder::Double => '=',
            BondOrder::Triple => '#',
            BondOrder::Aromatic => ':',
        }
    }

    pub fn valence(self) -> u8 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BondRecord {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

impl BondRecord {
    pub fn new(a: usize, b: usize, order: BondOrder) -> Self {
        BondRecord { a, b, order }
    }

    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("molecule has no atoms")]
    Empty,
    #[error("bond {bond} joins atom {atom} to itself")]
    SelfLoop { bond: usize, atom: usize },
    #[error("bond {bond} references atom {atom} but molecule has {n_atoms} atoms")]
    OutOfRange {
        bond: usize,
        atom: usize,
        n_atoms: usize,
    },
    #[error("bond {bond} duplicates the bond between atoms {a} and {b}")]
    Duplicate { bond: usize, a: usize, b: usize },
    #[error("atom {atom} has a non-finite coordinate")]
    NonFinite { atom: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeGraph {
    pub name: String,
    pub atoms: Vec<AtomRecord>,
    pub bonds: Vec<BondRecord>,
}

impl MoleculeGraph {
    /// Builds a molecule after checking that the bonds form a simple graph.
    pub fn new(
        name: impl Into<String>,
        atoms: Vec<AtomRecord>,
        bonds: Vec<BondRecord>,
    ) -> Result<Self, GraphError> {
        if atoms.is_empty() {
            return Err(GraphError::Empty);
        }
        for (i, a) in atoms.iter().enumerate() {
            if a.position.iter().any(|c| !c.is_finite()) {
                return Err(GraphError::NonFinite { atom: i });
            }
        }
        let n = atoms.len();
        let mut seen = HashSet::new();
        for (k, b) in bonds.iter().enumerate() {
            for atom in [b.a, b.b] {
                if atom >= n {
                    return Err(GraphError::OutOfRange {
                        bond: k,
                        atom,
                        n_atoms: n,
                    });
                }
            }
            if b.a == b.b {
                return Err(GraphError::SelfLoop { bond: k, atom: b.a });
            }
            if !seen.insert((b.a.min(b.b), b.a.max(b.b))) {
                return Err(GraphError::Duplicate {
                    bond: k,
                    a: b.a,
                    b: b.b,
                });
            }
        }
        Ok(MoleculeGraph {
            name: name.into(),
            atoms,
            bonds,
        })
    }

    /// Graph without any bonds, e.g. a generated point cloud.
    pub fn point_cloud(name: impl Into<String>, atoms: Vec<AtomRecord>) -> Result<Self, GraphError> {
        Self::new(name, atoms, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Per atom: (neighbor, bond index), in bond-list order.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.atoms.len()];
        for (k, b) in self.bonds.iter().enumerate() {
            adj[b.a].push((b.b, k));
            adj[b.b].push((b.a, k));
        }
        adj
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms.iter().filter(|a| !a.element.is_hydrogen()).count()
    }

    /// Heavy-atom subgraph plus the map from new to original indices.
    pub fn heavy_subgraph(&self) -> (MoleculeGraph, Vec<usize>) {
        let keep: Vec<usize> = (0..self.atoms.len())
            .filter(|&i| !self.atoms[i].element.is_hydrogen())
            .collect();
        self.induced_subgraph(&keep)
    }

    /// Subgraph induced by `keep` (original indices, in the given order).
    pub fn induced_subgraph(&self, keep: &[usize]) -> (MoleculeGraph, Vec<usize>) {
        let mut new_index = vec![usize::MAX; self.atoms.len()];
        for (k, &i) in keep.iter().enumerate() {
            new_index[i] = k;
        }
        let atoms = keep.iter().map(|&i| self.atoms[i]).collect();
        let bonds = self
            .bonds
            .iter()
            .filter(|b| new_index[b.a] != usize::MAX && new_index[b.b] != usize::MAX)
            .map(|b| BondRecord::new(new_index[b.a], new_index[b.b], b.order))
            .collect();
        (
            MoleculeGraph {
                name: self.name.clone(),
                atoms,
                bonds,
            },
            keep.to_vec(),
        )
    }

    /// Connected components, each sorted, ordered by their lowest atom.
    pub fn components(&self) -> Vec<Vec<usize>> {
        connected_components(self.atoms.len(), &self.adjacency())
    }
}

/// Connected components of an adjacency list.
pub fn connected_components(n: usize, adj: &[Vec<(usize, usize)>]) -> Vec<Vec<usize>> {
    let mut label = vec![usize::MAX; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = vec![start];
        label[start] = id;
        let mut head = 0;
        while head < members.len() {
            let v = members[head];
            head += 1;
            for &(w, _) in &adj[v] {
                if label[w] == usize::MAX {
                    label[w] = id;
                    members.push(w);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    comps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> AtomRecord {
        AtomRecord::new(Element::C, [x, 0.0, 0.0])
    }

    #[test]
    fn rejects_duplicate_and_self_bonds() {
        let atoms = vec![c(0.0), c(1.5)];
        let dup = vec![
            BondRecord::new(0, 1, BondOrder::Single),
            BondRecord::new(1, 0, BondOrder::Double),
        ];
        assert!(matches!(
            MoleculeGraph::new("x", atoms.clone(), dup),
            Err(GraphError::Duplicate { .. })
        ));
        let selfloop = vec![BondRecord::new(1, 1, BondOrder::Single)];
        assert!(matches!(
            MoleculeGraph::new("x", atoms, selfloop),
            Err(GraphError::SelfLoop { .. })
        ));
    }

    #[test]
    fn components_split() {
        let atoms = vec![c(0.0), c(1.5), c(10.0)];
        let m = MoleculeGraph::new("x", atoms, vec![BondRecord::new(0, 1, BondOrder::Single)])
            .unwrap();
        assert_eq!(m.components(), vec![vec![0, 1], vec![2]]);
    }
}
