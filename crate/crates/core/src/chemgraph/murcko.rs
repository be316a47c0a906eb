//! Bemis-Murcko decomposition by terminal-atom pruning.

use std::collections::BTreeSet;

use super::rings::find_rings;
use crate::structio::{connected_components, MoleculeGraph};

/// Atom indices refer to the input molecule; hydrogens are ignored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MurckoDecomposition {
    pub scaffold_atoms: BTreeSet<usize>,
    pub sidechain_components: Vec<BTreeSet<usize>>,
    /// Scaffold atoms outside every ring.
    pub linker_atoms: BTreeSet<usize>,
    /// No rings at all: empty scaffold, everything is side chain.
    pub acyclic: bool,
}

pub fn murcko_decompose(mol: &MoleculeGraph) -> MurckoDecomposition {
    let (heavy, map) = mol.heavy_subgraph();
    let n = heavy.len();
    let adj = heavy.adjacency();
    let mut in_ring = vec![false; n];
    for ring in find_rings(&heavy) {
        for a in ring {
            in_ring[a] = true;
        }
    }

    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&i| !in_ring[i] && degree[i] <= 1).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &(w, _) in &adj[v] {
            if alive[w] {
                degree[w] -= 1;
                if !in_ring[w] && degree[w] <= 1 {
                    stack.push(w);
                }
            }
        }
    }

    let scaffold_atoms: BTreeSet<usize> = (0..n).filter(|&i| alive[i]).map(|i| map[i]).collect();
    let linker_atoms = (0..n).filter(|&i| alive[i] && !in_ring[i]).map(|i| map[i]).collect();

    // components of the pruned atoms alone
    let pruned_adj: Vec<Vec<(usize, usize)>> = adj
        .iter()
        .enumerate()
        .map(|(v, list)| {
            if alive[v] {
                Vec::new()
            } else {
                list.iter().copied().filter(|&(w, _)| !alive[w]).collect()
            }
        })
        .collect();
    let sidechain_components = connected_components(n, &pruned_adj)
        .into_iter()
        .filter(|c| !alive[c[0]])
        .map(|c| c.into_iter().map(|i| map[i]).collect())
        .collect();

    MurckoDecomposition {
        acyclic: !in_ring.iter().any(|&r| r),
        scaffold_atoms,
        sidechain_components,
        linker_atoms,
    }
}
