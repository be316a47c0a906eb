//! Rule checker for emitted task instances. Works on the raw input graph
//! (bridges found by deletion, rings by cycle membership) and shares no
//! code with the decomposition search.

use std::collections::{BTreeSet, VecDeque};

use crate::structio::{BondOrder, MoleculeGraph};

use super::{TaskInstance, TaskKind, TaskThresholds};

struct Heavy {
    adj: Vec<Vec<(usize, usize)>>,
    bonds: Vec<(usize, usize, BondOrder)>,
}

fn heavy_graph(mol: &MoleculeGraph) -> Heavy {
    let n = mol.atoms.len();
    let mut adj = vec![Vec::new(); n];
    let mut bonds = Vec::new();
    for b in &mol.bonds {
        if mol.atoms[b.a].element.is_hydrogen() || mol.atoms[b.b].element.is_hydrogen() {
            continue;
        }
        adj[b.a].push((b.b, bonds.len()));
        adj[b.b].push((b.a, bonds.len()));
        bonds.push((b.a, b.b, b.order));
    }
    Heavy { adj, bonds }
}

/// Atoms reachable from `start` inside `within`, skipping bond `skip`.
fn reach(h: &Heavy, start: usize, within: &BTreeSet<usize>, skip: Option<usize>) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &(w, k) in &h.adj[v] {
            if Some(k) != skip && within.contains(&w) && seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen
}

fn components(h: &Heavy, set: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let mut left = set.clone();
    let mut out = Vec::new();
    while let Some(&s) = left.iter().next() {
        let c = reach(h, s, set, None);
        for a in &c {
            left.remove(a);
        }
        out.push(c);
    }
    out
}

fn is_bridge(h: &Heavy, k: usize, all: &BTreeSet<usize>) -> bool {
    let (a, b, _) = h.bonds[k];
    !reach(h, a, all, Some(k)).contains(&b)
}

fn in_cycle(h: &Heavy, atom: usize, all: &BTreeSet<usize>) -> bool {
    h.adj[atom].iter().any(|&(_, k)| !is_bridge(h, k, all))
}

fn crossing(h: &Heavy, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Vec<usize> {
    (0..h.bonds.len())
        .filter(|&k| {
            let (x, y, _) = h.bonds[k];
            (a.contains(&x) && b.contains(&y)) || (a.contains(&y) && b.contains(&x))
        })
        .collect()
}

fn cuttable(h: &Heavy, k: usize, all: &BTreeSet<usize>) -> bool {
    h.bonds[k].2 == BondOrder::Single && is_bridge(h, k, all)
}

/// Checks one instance against its kind's rules; returns every violation.
pub fn audit_instance(mol: &MoleculeGraph, inst: &TaskInstance, th: &TaskThresholds) -> Result<(), Vec<String>> {
    let mut errs = Vec::new();
    let n = mol.atoms.len();
    let ctx: BTreeSet<usize> = inst.context_atoms.iter().copied().collect();
    let tgt: BTreeSet<usize> = inst.target_atoms.iter().copied().collect();
    if ctx.len() != inst.context_atoms.len() || tgt.len() != inst.target_atoms.len() {
        errs.push("repeated atom index".into());
    }
    if !ctx.is_disjoint(&tgt) {
        errs.push("context and target overlap".into());
    }
    if ctx.len() + tgt.len() != n || ctx.iter().chain(&tgt).any(|&i| i >= n) {
        errs.push("context and target do not cover the ligand".into());
    }
    if !errs.is_empty() {
        return Err(errs);
    }

    let heavy = |s: &BTreeSet<usize>| -> BTreeSet<usize> {
        s.iter().copied().filter(|&i| !mol.atoms[i].element.is_hydrogen()).collect()
    };
    let (c, t) = (heavy(&ctx), heavy(&tgt));
    let all: BTreeSet<usize> = c.union(&t).copied().collect();
    let h = heavy_graph(mol);
    let min = th.min_fragment_atoms;

    match inst.kind {
        TaskKind::Denovo => {
            if !ctx.is_empty() {
                errs.push("de novo context must be empty".into());
            }
        }
        TaskKind::Linker => {
            let frags = components(&h, &c);
            let linker = components(&h, &t);
            if linker.len() != 1 {
                errs.push(format!("linker has {} parts", linker.len()));
            }
            if frags.len() != 2 {
                errs.push(format!("context has {} fragments, expected 2", frags.len()));
            } else {
                let mut attach = Vec::new();
                for f in &frags {
                    if f.len() <= min {
                        errs.push(format!("fragment of {} atoms", f.len()));
                    }
                    let cross = crossing(&h, f, &t);
                    if cross.len() != 1 || !cuttable(&h, cross[0], &all) {
                        errs.push("fragment not attached by one acyclic single bond".into());
                    } else {
                        let (x, y, _) = h.bonds[cross[0]];
                        attach.push(if t.contains(&x) { x } else { y });
                    }
                }
                if let [a, b] = attach[..] {
                    // shortest path inside the linker, counted in atoms
                    let mut depth = std::collections::BTreeMap::from([(a, 1usize)]);
                    let mut queue = VecDeque::from([a]);
                    while let Some(v) = queue.pop_front() {
                        for &(w, _) in &h.adj[v] {
                            if t.contains(&w) && !depth.contains_key(&w) {
                                depth.insert(w, depth[&v] + 1);
                                queue.push_back(w);
                            }
                        }
                    }
                    if depth.get(&b).copied().unwrap_or(0) < th.min_linker_path_atoms {
                        errs.push("linker path too short".into());
                    }
                }
            }
        }
        TaskKind::Fragment => {
            if components(&h, &c).len() != 1 || components(&h, &t).len() != 1 {
                errs.push("parts must each be connected".into());
            }
            let cross = crossing(&h, &c, &t);
            if cross.len() != 1 || !cuttable(&h, cross[0], &all) {
                errs.push("parts not joined by one acyclic single bond".into());
            }
            let (ns, nl) = (t.len(), c.len());
            if ns <= min || nl <= min {
                errs.push(format!("part sizes {ns}/{nl} not above {min}"));
            }
            if ns > nl {
                errs.push("grown part is the larger one".into());
            }
            if (ns as f64) <= nl as f64 * th.growing_size_ratio {
                errs.push("grown part not above the size ratio".into());
            }
        }
        TaskKind::Sidechain | TaskKind::Scaffold => {
            let (scaffold, chains) = if inst.kind == TaskKind::Sidechain { (&c, &t) } else { (&t, &c) };
            if scaffold.is_empty() || chains.is_empty() {
                errs.push("scaffold and side chains must both be non-empty".into());
            }
            if components(&h, scaffold).len() > 1 {
                errs.push("scaffold is disconnected".into());
            }
            if chains.iter().any(|&a| in_cycle(&h, a, &all)) {
                errs.push("ring atom in side chains".into());
            }
            for &a in scaffold {
                let deg = h.adj[a].iter().filter(|(w, _)| scaffold.contains(w)).count();
                if deg <= 1 && !in_cycle(&h, a, &all) {
                    errs.push(format!("scaffold atom {a} is a terminal acyclic atom"));
                }
            }
            for comp in components(&h, chains) {
                if crossing(&h, &comp, scaffold).len() != 1 {
                    errs.push("side chain not attached by exactly one bond".into());
                }
            }
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}
