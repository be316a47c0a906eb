//! Context/target partitions of a ligand for the four lead-optimization
//! tasks. Size rules count heavy atoms; hydrogens follow the heavy atom
//! they are bonded to.

use std::cmp::Reverse;
use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::chemgraph::{murcko_decompose, perceive};
use crate::structio::{BondOrder, MoleculeGraph};

use super::{TaskKind, TaskThresholds};

/// A partition over input-molecule atom indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub context_atoms: Vec<usize>,
    pub target_atoms: Vec<usize>,
    /// Input-molecule indices of the cut bonds (empty for murcko-based tasks).
    pub cut_bonds: Vec<usize>,
}

/// Heavy-atom graph with cuttable bonds (acyclic single) marked.
struct CutGraph {
    n: usize,
    bonds: Vec<(usize, usize)>,
    adjacency: Vec<Vec<(usize, usize)>>,
    cuttable: Vec<usize>,
    /// Heavy index to input index.
    original_atom: Vec<usize>,
    /// Heavy bond index to input bond index.
    original_bond: Vec<usize>,
}

impl CutGraph {
    fn new(mol: &MoleculeGraph) -> CutGraph {
        let p = perceive(mol);
        let bonds: Vec<(usize, usize)> = p.graph.bonds.iter().map(|b| (b.a, b.b)).collect();
        let cuttable = (0..bonds.len())
            .filter(|&k| !p.ring_bond[k] && p.bond_kind(k) == BondOrder::Single)
            .collect();
        // heavy bonds keep their relative input order
        let original_bond = mol
            .bonds
            .iter()
            .enumerate()
            .filter(|(_, b)| !mol.atoms[b.a].element.is_hydrogen() && !mol.atoms[b.b].element.is_hydrogen())
            .map(|(k, _)| k)
            .collect();
        CutGraph {
            n: p.len(),
            bonds,
            adjacency: p.adjacency.clone(),
            cuttable,
            original_atom: p.original_index.clone(),
            original_bond,
        }
    }

    /// Component label per atom with the given bonds removed.
    fn components_without(&self, removed: &[usize]) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &(w, k) in &self.adjacency[v] {
                    if label[w] == usize::MAX && !removed.contains(&k) {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Atoms on the shortest path from `a` to `b` staying inside `allowed`.
    fn path_atoms(&self, a: usize, b: usize, allowed: &dyn Fn(usize) -> bool) -> Option<usize> {
        let mut depth = vec![usize::MAX; self.n];
        depth[a] = 1;
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            if v == b {
                return Some(depth[v]);
            }
            for &(w, _) in &self.adjacency[v] {
                if depth[w] == usize::MAX && allowed(w) {
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    fn is_connected(&self) -> bool {
        self.n > 0 && self.components_without(&[]).1 == 1
    }
}

/// Lifts a heavy-atom target set to input indices; hydrogens join the side
/// of their heavy neighbor (isolated hydrogens join the target).
fn lift(mol: &MoleculeGraph, g: &CutGraph, heavy_target: &BTreeSet<usize>, cut: Vec<usize>) -> Partition {
    let mut in_target = vec![false; mol.atoms.len()];
    let mut heavy_of = vec![usize::MAX; mol.atoms.len()];
    for (h, &o) in g.original_atom.iter().enumerate() {
        heavy_of[o] = h;
        in_target[o] = heavy_target.contains(&h);
    }
    let adj = mol.adjacency();
    for i in 0..mol.atoms.len() {
        if heavy_of[i] == usize::MAX {
            in_target[i] = adj[i]
                .iter()
                .find(|&&(j, _)| heavy_of[j] != usize::MAX)
                .map_or(true, |&(j, _)| heavy_target.contains(&heavy_of[j]));
        }
    }
    let (target, context): (Vec<usize>, Vec<usize>) = (0..mol.atoms.len()).partition(|&i| in_target[i]);
    let mut cut_bonds: Vec<usize> = cut.into_iter().map(|k| g.original_bond[k]).collect();
    cut_bonds.sort_unstable();
    Partition {
        context_atoms: context,
        target_atoms: target,
        cut_bonds,
    }
}

/// Every feasible linker decomposition, best first: larger smaller
/// fragment, then smaller linker, then lower cut-bond indices.
pub fn linker_candidates(mol: &MoleculeGraph, th: &TaskThresholds) -> Vec<Partition> {
    let g = CutGraph::new(mol);
    if !g.is_connected() {
        return Vec::new();
    }
    let mut found = Vec::new();
    for (x, &b1) in g.cuttable.iter().enumerate() {
        for &b2 in &g.cuttable[x + 1..] {
            let (label, count) = g.components_without(&[b1, b2]);
            if count != 3 {
                continue;
            }
            let (u1, v1) = g.bonds[b1];
            let (u2, v2) = g.bonds[b2];
            // the linker is the part touched by both cut bonds
            let Some((l1, l2)) = [(u1, u2), (u1, v2), (v1, u2), (v1, v2)]
                .into_iter()
                .find(|&(a, b)| label[a] == label[b])
            else {
                continue;
            };
            let linker = label[l1];
            let frag_a = if label[u1] == linker { label[v1] } else { label[u1] };
            let frag_b = if label[u2] == linker { label[v2] } else { label[u2] };
            let size = |c: usize| label.iter().filter(|&&l| l == c).count();
            let (na, nb, nl) = (size(frag_a), size(frag_b), size(linker));
            if na <= th.min_fragment_atoms || nb <= th.min_fragment_atoms {
                continue;
            }
            let path = g.path_atoms(l1, l2, &|w| label[w] == linker).unwrap_or(0);
            if path < th.min_linker_path_atoms {
                continue;
            }
            let target: BTreeSet<usize> = (0..g.n).filter(|&i| label[i] == linker).collect();
            found.push(((Reverse(na.min(nb)), nl, (b1, b2)), target, vec![b1, b2]));
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    found.into_iter().map(|(_, t, cut)| lift(mol, &g, &t, cut)).collect()
}

pub fn decompose_linker(mol: &MoleculeGraph, th: &TaskThresholds) -> Option<Partition> {
    linker_candidates(mol, th).into_iter().next()
}

/// Every feasible fragment-growing cut, best first: larger grown part,
/// then lower bond index. The smaller part is the target; on an even
/// split, the part holding the lowest atom index.
pub fn fragment_candidates(mol: &MoleculeGraph, th: &TaskThresholds) -> Vec<Partition> {
    let g = CutGraph::new(mol);
    if !g.is_connected() {
        return Vec::new();
    }
    let mut found = Vec::new();
    for &b in &g.cuttable {
        let (label, count) = g.components_without(&[b]);
        if count != 2 {
            continue;
        }
        let n0 = label.iter().filter(|&&l| l == 0).count();
        let n1 = g.n - n0;
        // label 0 holds atom 0, so it wins an even split
        let (small_label, small, large) = if n1 < n0 { (1, n1, n0) } else { (0, n0, n1) };
        if small <= th.min_fragment_atoms
            || large <= th.min_fragment_atoms
            || (small as f64) <= large as f64 * th.growing_size_ratio
        {
            continue;
        }
        let target: BTreeSet<usize> = (0..g.n).filter(|&i| label[i] == small_label).collect();
        found.push(((Reverse(small), b), target, vec![b]));
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    found.into_iter().map(|(_, t, cut)| lift(mol, &g, &t, cut)).collect()
}

pub fn decompose_fragment_growing(mol: &MoleculeGraph, th: &TaskThresholds) -> Option<Partition> {
    fragment_candidates(mol, th).into_iter().next()
}

fn murcko_partition(mol: &MoleculeGraph, target_is_scaffold: bool) -> Option<Partition> {
    let g = CutGraph::new(mol);
    if !g.is_connected() {
        return None;
    }
    let m = murcko_decompose(mol);
    if m.scaffold_atoms.is_empty() || m.sidechain_components.is_empty() {
        return None;
    }
    let heavy_of = |o: usize| g.original_atom.iter().position(|&x| x == o).expect("heavy atom");
    let scaffold: BTreeSet<usize> = m.scaffold_atoms.iter().map(|&o| heavy_of(o)).collect();
    let target = if target_is_scaffold {
        scaffold
    } else {
        (0..g.n).filter(|i| !scaffold.contains(i)).collect()
    };
    Some(lift(mol, &g, &target, Vec::new()))
}

pub fn decompose_sidechain(mol: &MoleculeGraph) -> Option<Partition> {
    murcko_partition(mol, false)
}

pub fn decompose_scaffold(mol: &MoleculeGraph) -> Option<Partition> {
    murcko_partition(mol, true)
}

pub fn decompose_denovo(mol: &MoleculeGraph) -> Partition {
    Partition {
        context_atoms: Vec::new(),
        target_atoms: (0..mol.atoms.len()).collect(),
        cut_bonds: Vec::new(),
    }
}

/// The chosen decomposition for a task kind.
pub fn decompose(mol: &MoleculeGraph, kind: TaskKind, th: &TaskThresholds) -> Option<Partition> {
    match kind {
        TaskKind::Denovo => Some(decompose_denovo(mol)),
        TaskKind::Linker => decompose_linker(mol, th),
        TaskKind::Fragment => decompose_fragment_growing(mol, th),
        TaskKind::Sidechain => decompose_sidechain(mol),
        TaskKind::Scaffold => decompose_scaffold(mol),
    }
}

/// Every feasible decomposition; murcko-based kinds have at most one.
pub fn all_candidates(mol: &MoleculeGraph, kind: TaskKind, th: &TaskThresholds) -> Vec<Partition> {
    match kind {
        TaskKind::Linker => linker_candidates(mol, th),
        TaskKind::Fragment => fragment_candidates(mol, th),
        _ => decompose(mol, kind, th).into_iter().collect(),
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn th() -> TaskThresholds {
        TaskThresholds::default()
    }

    #[test]
    fn bibenzyl_linker_is_the_bridge() {
        let p = decompose_linker(&bibenzyl(), &th()).unwrap();
        assert_eq!(p.target_atoms, vec![6, 7]);
        assert_eq!(p.context_atoms.len(), 12);
        assert_eq!(linker_candidates(&bibenzyl(), &th()).len(), 1);
    }

    #[test]
    fn no_linker_in_benzene_or_toluene() {
        assert!(decompose_linker(&benzene(), &th()).is_none());
        assert!(decompose_linker(&toluene(), &th()).is_none());
    }

    #[test]
    fn thirteen_chain_grows_six() {
        let p = decompose_fragment_growing(&chain(13), &th()).unwrap();
        assert_eq!(p.target_atoms.len(), 6);
        // cuts after atom 5 and after atom 6 both give 6+7; bond 5 is lower
        assert_eq!(p.target_atoms, (0..6).collect::<Vec<_>>());
        assert_eq!(p.cut_bonds, vec![5]);
    }

    #[test]
    fn twelve_chain_even_split_takes_lower_part() {
        let p = decompose_fragment_growing(&chain(12), &th()).unwrap();
        assert_eq!(p.target_atoms, (0..6).collect::<Vec<_>>());
        assert_eq!(fragment_candidates(&chain(12), &th()).len(), 1);
    }

    #[test]
    fn ten_atoms_cannot_grow() {
        assert!(decompose_fragment_growing(&chain(10), &th()).is_none());
    }

    #[test]
    fn toluene_sidechain_and_scaffold() {
        let sc = decompose_sidechain(&toluene()).unwrap();
        let sf = decompose_scaffold(&toluene()).unwrap();
        assert_eq!(sc.target_atoms, vec![6]);
        assert_eq!(sf.target_atoms, (0..6).collect::<Vec<_>>());
        assert_eq!(sc.target_atoms, sf.context_atoms);
        assert_eq!(sc.context_atoms, sf.target_atoms);
    }

    #[test]
    fn benzene_has_no_sidechain_task() {
        assert!(decompose_sidechain(&benzene()).is_none());
        assert!(decompose_scaffold(&benzene()).is_none());
        assert!(decompose_sidechain(&chain(8)).is_none());
    }

    #[test]
    fn hydrogens_follow_their_heavy_atom() {
        use crate::elements::Element;
        use crate::structio::{AtomRecord, BondRecord};
        let mut mol = toluene();
        mol.atoms.push(AtomRecord::new(Element::H, [0.0, 1.0, 0.0]));
        mol.atoms.push(AtomRecord::new(Element::H, [0.0, 2.0, 0.0]));
        mol.bonds.push(BondRecord::new(6, 7, BondOrder::Single));
        mol.bonds.push(BondRecord::new(1, 8, BondOrder::Single));
        let sc = decompose_sidechain(&mol).unwrap();
        assert_eq!(sc.target_atoms, vec![6, 7]);
        assert_eq!(sc.context_atoms, vec![0, 1, 2, 3, 4, 5, 8]);
    }

    #[test]
    fn ring_bonds_and_double_bonds_are_not_cut() {
        use crate::elements::Element;
        // two 6-chains joined by a double bond
        let mut b: Vec<_> = (0..5).map(|i| (i, i + 1, BondOrder::Single)).collect();
        b.extend((6..11).map(|i| (i, i + 1, BondOrder::Single)));
        b.push((5, 6, BondOrder::Double));
        let mol = graph(&[Element::C; 12], &b);
        assert!(decompose_fragment_growing(&mol, &th()).is_none());
    }
}
