//! Functional-group library and subgraph matching.
//!
//! A match is an injective map from pattern atoms to molecule atoms that
//! preserves element, aromaticity and the type of every pattern bond
//! (non-induced: extra molecule bonds are allowed). Occurrences are the
//! distinct images (atom set plus bond set), so symmetric embeddings of
//! one occurrence count once.

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

use serde::Deserialize;

use super::perception::Perceived;
use super::ChemError;
use crate::elements::Element;
use crate::structio::BondOrder;

const LIBRARY_TOML: &str = include_str!("../../data/functional_groups.toml");

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalGroupPattern {
    pub id: String,
    pub elements: Vec<Element>,
    pub aromatic: Vec<bool>,
    pub charges: Vec<i8>,
    pub bonds: Vec<(usize, usize, BondOrder)>,
    /// Framing positions (A, B, C); several indices denote their centroid.
    pub anchors: [Vec<usize>; 3],
}

#[derive(Deserialize)]
struct LibraryFile {
    version: u32,
    group: Vec<GroupEntry>,
}

#[derive(Deserialize)]
struct GroupEntry {
    id: String,
    atoms: Vec<String>,
    bonds: Vec<(usize, usize, String)>,
    anchors: Vec<Vec<usize>>,
}

fn parse_atom_token(tok: &str) -> Option<(Element, bool, i8)> {
    let (sym, charge) = match tok.strip_suffix('+') {
        Some(s) => (s, 1),
        None => match tok.strip_suffix('-') {
            Some(s) => (s, -1),
            None => (tok, 0),
        },
    };
    let aromatic = sym.starts_with(|c: char| c.is_ascii_lowercase());
    Element::from_symbol(sym).map(|e| (e, aromatic, charge))
}

/// Parses a library file in the bundled TOML format.
pub fn parse_library(text: &str) -> Result<Vec<FunctionalGroupPattern>, ChemError> {
    let file: LibraryFile = toml::from_str(text).map_err(|e| ChemError::Library(e.to_string()))?;
    if file.version != 1 {
        return Err(ChemError::Library(format!("unsupported library version {}", file.version)));
    }
    let mut out = Vec::new();
    for g in file.group {
        let bad = |msg: String| ChemError::Library(format!("group '{}': {msg}", g.id));
        let mut elements = Vec::new();
        let mut aromatic = Vec::new();
        let mut charges = Vec::new();
        for tok in &g.atoms {
            let (e, a, c) = parse_atom_token(tok).ok_or_else(|| bad(format!("unknown atom '{tok}'")))?;
            elements.push(e);
            aromatic.push(a);
            charges.push(c);
        }
        let n = elements.len();
        let mut bonds = Vec::new();
        for (a, b, o) in &g.bonds {
            let order = match o.as_str() {
                "-" => BondOrder::Single,
                "=" => BondOrder::Double,
                "#" => BondOrder::Triple,
                ":" => BondOrder::Aromatic,
                other => return Err(bad(format!("unknown bond order '{other}'"))),
            };
            if *a >= n || *b >= n || a == b {
                return Err(bad(format!("bad bond {a}-{b}")));
            }
            bonds.push((*a, *b, order));
        }
        if g.anchors.len() != 3 || g.anchors.iter().any(|x| x.is_empty() || x.iter().any(|&i| i >= n)) {
            return Err(bad("anchors must be three non-empty lists of valid atoms".into()));
        }
        let pattern = FunctionalGroupPattern {
            id: g.id.clone(),
            elements,
            aromatic,
            charges,
            bonds,
            anchors: [g.anchors[0].clone(), g.anchors[1].clone(), g.anchors[2].clone()],
        };
        if !pattern.is_connected() {
            return Err(bad("pattern graph is not connected".into()));
        }
        out.push(pattern);
    }
    Ok(out)
}

/// The bundled 25-group library.
pub fn default_library() -> &'static [FunctionalGroupPattern] {
    static LIB: OnceLock<Vec<FunctionalGroupPattern>> = OnceLock::new();
    LIB.get_or_init(|| parse_library(LIBRARY_TOML).expect("bundled library is valid"))
}

impl FunctionalGroupPattern {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    fn adjacency(&self) -> Vec<Vec<(usize, BondOrder)>> {
        let mut adj = vec![Vec::new(); self.len()];
        for &(a, b, o) in &self.bonds {
            adj[a].push((b, o));
            adj[b].push((a, o));
        }
        adj
    }

    fn is_connected(&self) -> bool {
        !self.is_empty() && bfs_order(&self.adjacency()).len() == self.len()
    }
}

fn bfs_order(adj: &[Vec<(usize, BondOrder)>]) -> Vec<usize> {
    let mut order = vec![0];
    let mut seen = vec![false; adj.len()];
    seen[0] = true;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &(w, _) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                order.push(w);
            }
        }
    }
    order
}

type Image = (Vec<usize>, Vec<usize>);

/// Distinct occurrences of one pattern in a perceived molecule.
pub fn count_occurrences(mol: &Perceived, pattern: &FunctionalGroupPattern) -> usize {
    occurrences(mol, pattern).len()
}

fn occurrences(mol: &Perceived, pattern: &FunctionalGroupPattern) -> HashSet<Image> {
    let mut images = HashSet::new();
    if pattern.is_empty() || pattern.len() > mol.len() {
        return images;
    }
    let padj = pattern.adjacency();
    let order = bfs_order(&padj);
    let mut position = vec![0; pattern.len()];
    for (k, &v) in order.iter().enumerate() {
        position[v] = k;
    }
    // for each pattern atom after the first: an earlier neighbor to extend from
    let anchor: Vec<Option<usize>> = order
        .iter()
        .map(|&v| padj[v].iter().map(|&(w, _)| w).filter(|&w| position[w] < position[v]).min_by_key(|&w| position[w]))
        .collect();
    let mut map = vec![usize::MAX; pattern.len()];
    let mut used = vec![false; mol.len()];
    extend(mol, pattern, &padj, &order, &anchor, 0, &mut map, &mut used, &mut images);
    images
}

#[allow(clippy::too_many_arguments)]
fn extend(
    mol: &Perceived,
    pattern: &FunctionalGroupPattern,
    padj: &[Vec<(usize, BondOrder)>],
    order: &[usize],
    anchor: &[Option<usize>],
    depth: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    images: &mut HashSet<Image>,
) {
    if depth == order.len() {
        let mut atoms: Vec<usize> = map.clone();
        atoms.sort_unstable();
        let mut bonds: Vec<usize> = pattern
            .bonds
            .iter()
            .filter_map(|&(a, b, _)| mol.bond_between(map[a], map[b]))
            .collect();
        bonds.sort_unstable();
        images.insert((atoms, bonds));
        return;
    }
    let pv = order[depth];
    let candidates: Vec<usize> = match anchor[depth] {
        Some(parent) => mol.adjacency[map[parent]].iter().map(|&(w, _)| w).collect(),
        None => (0..mol.len()).collect(),
    };
    for m in candidates {
        if used[m] || mol.element(m) != pattern.elements[pv] || mol.aromatic_atom[m] != pattern.aromatic[pv] {
            continue;
        }
        let consistent = padj[pv].iter().all(|&(pw, order)| {
            map[pw] == usize::MAX
                || mol
                    .bond_between(m, map[pw])
                    .is_some_and(|k| mol.bond_kind(k) == order)
        });
        if !consistent {
            continue;
        }
        map[pv] = m;
        used[m] = true;
        extend(mol, pattern, padj, order, anchor, depth + 1, map, used, images);
        used[m] = false;
        map[pv] = usize::MAX;
    }
}

/// Occurrence counts aligned with `library`.
pub fn count_functional_groups(mol: &Perceived, library: &[FunctionalGroupPattern]) -> Vec<usize> {
    library.iter().map(|p| count_occurrences(mol, p)).collect()
}

/// Occurrence count per pattern id.
pub fn match_functional_groups(mol: &Perceived, library: &[FunctionalGroupPattern]) -> BTreeMap<String, usize> {
    library
        .iter()
        .zip(count_functional_groups(mol, library))
        .map(|(p, c)| (p.id.clone(), c))
        .collect()
}
