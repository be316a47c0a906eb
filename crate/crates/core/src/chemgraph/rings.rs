//! Smallest set of smallest rings via Horton candidates and GF(2) elimination.

use crate::structio::{connected_components, MoleculeGraph};

/// SSSR cycles as atom sequences in ring order. Each cycle starts at its
/// lowest atom and proceeds toward the lower of that atom's two ring
/// neighbors; the list is sorted by size, then by sorted atom set.
pub fn find_rings(mol: &MoleculeGraph) -> Vec<Vec<usize>> {
    let edges: Vec<(usize, usize)> = mol.bonds.iter().map(|b| (b.a, b.b)).collect();
    rings_of_graph(mol.atoms.len(), &edges)
}

/// Cycle basis count |E| - |V| + C.
pub fn cyclomatic_number(n: usize, edges: &[(usize, usize)]) -> usize {
    let adj = adjacency(n, edges);
    let c = connected_components(n, &adj).len();
    (edges.len() + c).saturating_sub(n)
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); n];
    for (k, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, k));
        adj[b].push((a, k));
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

struct Candidate {
    atoms: Vec<usize>,
    sorted: Vec<usize>,
    edges: Vec<u64>,
}

pub fn rings_of_graph(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let k = cyclomatic_number(n, edges);
    if k == 0 {
        return Vec::new();
    }
    let adj = adjacency(n, edges);
    let words = edges.len().div_ceil(64);
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut seen = std::collections::HashSet::new();

    for root in 0..n {
        // BFS tree with ascending neighbor order
        let mut parent = vec![usize::MAX; n];
        let mut parent_edge = vec![usize::MAX; n];
        let mut depth = vec![usize::MAX; n];
        depth[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &adj[v] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = v;
                    parent_edge[w] = e;
                    queue.push_back(w);
                }
            }
        }
        let path = |mut v: usize| {
            let mut p = vec![v];
            let mut es = Vec::new();
            while v != root {
                es.push(parent_edge[v]);
                v = parent[v];
                p.push(v);
            }
            (p, es)
        };
        for (e, &(x, y)) in edges.iter().enumerate() {
            if depth[x] == usize::MAX || depth[y] == usize::MAX {
                continue;
            }
            if parent_edge[x] == e || parent_edge[y] == e {
                continue;
            }
            let (px, ex) = path(x);
            let (py, ey) = path(y);
            // paths may only share the root
            let share = px[..px.len() - 1].iter().any(|a| py[..py.len() - 1].contains(a));
            if share {
                continue;
            }
            let mut bits = vec![0u64; words];
            for &edge in ex.iter().chain(ey.iter()).chain(std::iter::once(&e)) {
                bits[edge / 64] ^= 1 << (edge % 64);
            }
            if !seen.insert(bits.clone()) {
                continue;
            }
            // ring order: root .. x, then y .. back toward root
            let mut atoms: Vec<usize> = px.iter().rev().copied().collect();
            atoms.extend(py[..py.len() - 1].iter().copied());
            let atoms = canonical_cycle(atoms);
            let mut sorted = atoms.clone();
            sorted.sort_unstable();
            candidates.push(Candidate {
                atoms,
                sorted,
                edges: bits,
            });
        }
    }
    candidates.sort_by(|a, b| {
        a.atoms
            .len()
            .cmp(&b.atoms.len())
            .then_with(|| a.sorted.cmp(&b.sorted))
            .then_with(|| a.atoms.cmp(&b.atoms))
    });

    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut rings = Vec::new();
    for cand in candidates {
        let mut v = cand.edges.clone();
        for (pivot, row) in &basis {
            if v[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (a, b) in v.iter_mut().zip(row) {
                    *a ^= b;
                }
            }
        }
        if let Some(pivot) = first_bit(&v) {
            // keep rows fully reduced on their pivots
            for (_, row) in basis.iter_mut() {
                if row[pivot / 64] >> (pivot % 64) & 1 == 1 {
                    for (a, b) in row.iter_mut().zip(&v) {
                        *a ^= b;
                    }
                }
            }
            basis.push((pivot, v));
            rings.push(cand.atoms);
            if rings.len() == k {
                break;
            }
        }
    }
    rings
}

fn first_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn canonical_cycle(mut atoms: Vec<usize>) -> Vec<usize> {
    let n = atoms.len();
    let start = (0..n).min_by_key(|&i| atoms[i]).unwrap_or(0);
    atoms.rotate_left(start);
    if n > 2 && atoms[n - 1] < atoms[1] {
        atoms[1..].reverse();
    }
    atoms
}
