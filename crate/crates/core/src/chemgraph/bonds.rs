//! Distance-based bond perception and bond-order assignment for point clouds.
//!
//! Connectivity: heavy atoms bond when `0.4 <= d <= r_i + r_j + tol`
//! (covalent radii); each hydrogen bonds only to its nearest heavy atom
//! within the same cutoff.
//!
//! Orders: the single-bond reference length is the covalent-radius sum, so
//! `deficit = r_i + r_j - d` grows with bond order. Triple bonds are
//! assigned first on linear atoms, then S/P oxo groups, then nitro groups,
//! then double bonds via a maximum matching over short bonds between
//! sp2-compatible atoms, preferring larger total deficit among matchings
//! of equal size. Valence capacities (C4, N3, O2, S2/4/6, P3/5, X1) are
//! never exceeded.

use super::ChemError;
use crate::elements::Element;
use crate::geom::{angle_deg, dist};
use crate::structio::{AtomRecord, BondOrder, BondRecord};

pub const STRICT_TOLERANCE: f64 = 0.45;
pub const FALLBACK_TOLERANCE: f64 = 0.56;
pub const MIN_BOND_DISTANCE: f64 = 0.4;

const TRIPLE_DEFICIT: f64 = 0.25;
const DOUBLE_DEFICIT: f64 = 0.10;
const NITRO_DEFICIT: f64 = 0.08;
const PLANAR_ANGLE_SUM: f64 = 345.0;
const LINEAR_ANGLE: f64 = 150.0;
const MATCHING_NODE_BUDGET: usize = 200_000;

/// Bonds with orders for a point cloud, strict tolerance.
pub fn perceive_bonds(atoms: &[AtomRecord]) -> Result<Vec<BondRecord>, ChemError> {
    perceive_bonds_with(atoms, STRICT_TOLERANCE)
}

pub fn perceive_bonds_with(atoms: &[AtomRecord], tolerance: f64) -> Result<Vec<BondRecord>, ChemError> {
    let pairs = connect(atoms, tolerance)?;
    Ok(assign_bond_orders(atoms, &pairs).0)
}

/// Connectivity only, as sorted `(i, j)` pairs with `i < j`.
pub fn connect(atoms: &[AtomRecord], tolerance: f64) -> Result<Vec<(usize, usize)>, ChemError> {
    if atoms.is_empty() {
        return Err(ChemError::EmptyInput);
    }
    let n = atoms.len();
    let mut pairs = Vec::new();
    let mut nearest_heavy: Vec<Option<(f64, usize)>> = vec![None; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(atoms[i].position, atoms[j].position);
            if d < MIN_BOND_DISTANCE {
                return Err(ChemError::DegenerateGeometry {
                    a: i,
                    b: j,
                    distance: d,
                });
            }
            let (ei, ej) = (atoms[i].element, atoms[j].element);
            let cutoff = ei.covalent_radius() + ej.covalent_radius() + tolerance;
            if d > cutoff {
                continue;
            }
            match (ei.is_hydrogen(), ej.is_hydrogen()) {
                (false, false) => pairs.push((i, j)),
                (true, false) => keep_nearest(&mut nearest_heavy[i], d, j),
                (false, true) => keep_nearest(&mut nearest_heavy[j], d, i),
                (true, true) => {}
            }
        }
    }
    for (h, best) in nearest_heavy.iter().enumerate() {
        if let Some((_, heavy)) = best {
            pairs.push((h.min(*heavy), h.max(*heavy)));
        }
    }
    pairs.sort_unstable();
    Ok(pairs)
}

fn keep_nearest(slot: &mut Option<(f64, usize)>, d: f64, idx: usize) {
    match slot {
        Some((best, _)) if *best <= d => {}
        _ => *slot = Some((d, idx)),
    }
}

struct OrderState<'a> {
    atoms: &'a [AtomRecord],
    pairs: &'a [(usize, usize)],
    adj: Vec<Vec<(usize, usize)>>,
    orders: Vec<u8>,
    charges: Vec<i8>,
    deficit: Vec<f64>,
}

impl OrderState<'_> {
    fn used(&self, i: usize) -> u8 {
        self.adj[i].iter().map(|&(_, k)| self.orders[k]).sum()
    }

    fn capacity(&self, i: usize) -> i16 {
        let max = self.atoms[i]
            .element
            .charged_valences(self.charges[i])
            .last()
            .copied()
            .unwrap_or(0);
        i16::from(max) - i16::from(self.used(i))
    }

    fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    fn has_multiple(&self, i: usize) -> bool {
        self.adj[i].iter().any(|&(_, k)| self.orders[k] > 1)
    }

    fn angles(&self, i: usize) -> Vec<f64> {
        let nb = &self.adj[i];
        let mut out = Vec::new();
        for x in 0..nb.len() {
            for y in x + 1..nb.len() {
                out.push(angle_deg(
                    self.atoms[nb[x].0].position,
                    self.atoms[i].position,
                    self.atoms[nb[y].0].position,
                ));
            }
        }
        out
    }

    fn is_linear(&self, i: usize) -> bool {
        match self.degree(i) {
            0 | 1 => true,
            2 => self.angles(i)[0] >= LINEAR_ANGLE,
            _ => false,
        }
    }

    fn is_planar(&self, i: usize) -> bool {
        match self.degree(i) {
            0..=2 => true,
            3 => self.angles(i).iter().sum::<f64>() >= PLANAR_ANGLE_SUM,
            _ => false,
        }
    }

    fn sorted_by_deficit(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.pairs.len()).collect();
        idx.sort_by(|&x, &y| {
            self.deficit[y]
                .partial_cmp(&self.deficit[x])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(x.cmp(&y))
        });
        idx
    }

    fn pi_eligible(&self, i: usize) -> bool {
        if self.capacity(i) < 1 || self.has_multiple(i) {
            return false;
        }
        match self.atoms[i].element.number() {
            6 => self.degree(i) <= 3 && self.is_planar(i),
            7 => self.degree(i) <= 2 || self.is_planar(i),
            8 | 16 | 34 => self.degree(i) == 1,
            _ => false,
        }
    }
}

/// Assigns orders to the given connectivity. Returns bonds (same order as
/// `pairs`) and per-atom formal charges (input charges plus any nitro
/// charge separation introduced here).
pub fn assign_bond_orders(atoms: &[AtomRecord], pairs: &[(usize, usize)]) -> (Vec<BondRecord>, Vec<i8>) {
    let mut adj = vec![Vec::new(); atoms.len()];
    for (k, &(a, b)) in pairs.iter().enumerate() {
        adj[a].push((b, k));
        adj[b].push((a, k));
    }
    let deficit = pairs
        .iter()
        .map(|&(a, b)| {
            atoms[a].element.covalent_radius() + atoms[b].element.covalent_radius()
                - dist(atoms[a].position, atoms[b].position)
        })
        .collect();
    let mut st = OrderState {
        atoms,
        pairs,
        adj,
        orders: vec![1; pairs.len()],
        charges: atoms.iter().map(|a| a.formal_charge).collect(),
        deficit,
    };
    let heavy = |i: usize| !atoms[i].element.is_hydrogen();

    // triple bonds
    for k in st.sorted_by_deficit() {
        let (a, b) = pairs[k];
        if st.deficit[k] < TRIPLE_DEFICIT || !heavy(a) || !heavy(b) {
            continue;
        }
        let cn = |i: usize| matches!(atoms[i].element.number(), 6 | 7);
        if cn(a) && cn(b) && st.is_linear(a) && st.is_linear(b) && st.capacity(a) >= 2 && st.capacity(b) >= 2 {
            st.orders[k] = 3;
        }
    }

    // oxo groups on S, P, Se
    for k in st.sorted_by_deficit() {
        let (a, b) = pairs[k];
        if st.deficit[k] < DOUBLE_DEFICIT {
            continue;
        }
        for (center, partner) in [(a, b), (b, a)] {
            let c_el = atoms[center].element.number();
            let p_el = atoms[partner].element.number();
            if matches!(c_el, 15 | 16 | 34)
                && matches!(p_el, 7 | 8 | 16)
                && st.degree(partner) == 1
                && st.degree(center) > 1
                && st.capacity(center) >= 1
                && st.capacity(partner) >= 1
                && st.orders[k] == 1
            {
                st.orders[k] = 2;
            }
        }
    }

    // nitro groups: N(=O)O with N+ and O-
    for n in 0..atoms.len() {
        if atoms[n].element != Element::N || st.degree(n) != 3 || st.has_multiple(n) || st.charges[n] != 0 {
            continue;
        }
        let mut oxygens: Vec<(f64, usize, usize)> = st.adj[n]
            .iter()
            .filter(|&&(o, k)| {
                atoms[o].element == Element::O && st.degree(o) == 1 && st.deficit[k] >= NITRO_DEFICIT
            })
            .map(|&(o, k)| (st.deficit[k], k, o))
            .collect();
        if oxygens.len() < 2 {
            continue;
        }
        oxygens.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal).then(x.1.cmp(&y.1)));
        st.charges[n] = 1;
        st.orders[oxygens[0].1] = 2;
        st.charges[oxygens[1].2] = -1;
    }

    // double bonds by matching
    let eligible: Vec<bool> = (0..atoms.len()).map(|i| heavy(i) && st.pi_eligible(i)).collect();
    let mut cand: Vec<Vec<(usize, usize)>> = vec![Vec::new(); atoms.len()];
    for (k, &(a, b)) in pairs.iter().enumerate() {
        let both_oxygen = atoms[a].element == Element::O && atoms[b].element == Element::O;
        if eligible[a] && eligible[b] && st.deficit[k] >= DOUBLE_DEFICIT && !both_oxygen {
            cand[a].push((b, k));
            cand[b].push((a, k));
        }
    }
    for list in &mut cand {
        list.sort_by(|x, y| {
            st.deficit[y.1]
                .partial_cmp(&st.deficit[x.1])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(x.1.cmp(&y.1))
        });
    }
    for k in best_matching(&cand, &st.deficit) {
        st.orders[k] = 2;
    }

    let bonds = pairs
        .iter()
        .zip(&st.orders)
        .map(|(&(a, b), &o)| {
            let order = match o {
                3 => BondOrder::Triple,
                2 => BondOrder::Double,
                _ => BondOrder::Single,
            };
            BondRecord::new(a, b, order)
        })
        .collect();
    (bonds, st.charges)
}

/// Maximum-cardinality matching with the largest deficit sum among ties,
/// by branch and bound per connected component.
fn best_matching(cand: &[Vec<(usize, usize)>], deficit: &[f64]) -> Vec<usize> {
    let n = cand.len();
    let mut seen = vec![false; n];
    let mut chosen = Vec::new();
    for start in 0..n {
        if seen[start] || cand[start].is_empty() {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &(w, _) in &cand[v] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        let mut search = MatchSearch {
            cand,
            deficit,
            comp: &comp,
            mate: vec![usize::MAX; n],
            skipped: vec![false; n],
            current: Vec::new(),
            current_score: 0.0,
            best: Vec::new(),
            best_score: f64::NEG_INFINITY,
            nodes: 0,
        };
        search.seed_greedy();
        search.recurse(0);
        chosen.extend(search.best);
    }
    chosen.sort_unstable();
    chosen
}

struct MatchSearch<'a> {
    cand: &'a [Vec<(usize, usize)>],
    deficit: &'a [f64],
    comp: &'a [usize],
    mate: Vec<usize>,
    skipped: Vec<bool>,
    current: Vec<usize>,
    current_score: f64,
    best: Vec<usize>,
    best_score: f64,
    nodes: usize,
}

impl MatchSearch<'_> {
    fn free(&self, v: usize) -> bool {
        self.mate[v] == usize::MAX && !self.skipped[v]
    }

    fn open(&self, v: usize) -> bool {
        self.free(v) && self.cand[v].iter().any(|&(w, _)| self.free(w))
    }

    fn seed_greedy(&mut self) {
        let mut mate = vec![false; self.cand.len()];
        let mut edges: Vec<(usize, usize, usize)> = Vec::new();
        for &v in self.comp {
            for &(w, k) in &self.cand[v] {
                if v < w {
                    edges.push((k, v, w));
                }
            }
        }
        edges.sort_by(|x, y| {
            self.deficit[y.0]
                .partial_cmp(&self.deficit[x.0])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(x.0.cmp(&y.0))
        });
        let mut picked = Vec::new();
        let mut score = 0.0;
        for (k, v, w) in edges {
            if !mate[v] && !mate[w] {
                mate[v] = true;
                mate[w] = true;
                picked.push(k);
                score += self.deficit[k];
            }
        }
        self.best_score = picked.len() as f64 * 1e6 + score;
        self.best = picked;
    }

    fn recurse(&mut self, from: usize) {
        self.nodes += 1;
        if self.nodes > MATCHING_NODE_BUDGET {
            return;
        }
        let open: Vec<usize> = self.comp.iter().copied().filter(|&v| self.open(v)).collect();
        let bound = (self.current.len() + open.len() / 2) as f64 * 1e6 + 1e5;
        if bound < self.best_score {
            return;
        }
        let next = self.comp[from.min(self.comp.len())..]
            .iter()
            .copied()
            .find(|&v| self.open(v));
        let Some(v) = next else {
            let score = self.current.len() as f64 * 1e6 + self.current_score;
            if score > self.best_score + 1e-9 {
                self.best_score = score;
                self.best = self.current.clone();
            }
            return;
        };
        let pos = self.comp.iter().position(|&x| x == v).unwrap_or(0);
        for &(w, k) in &self.cand[v].clone() {
            if !self.free(w) {
                continue;
            }
            self.mate[v] = w;
            self.mate[w] = v;
            self.current.push(k);
            self.current_score += self.deficit[k];
            self.recurse(pos + 1);
            self.current_score -= self.deficit[k];
            self.current.pop();
            self.mate[v] = usize::MAX;
            self.mate[w] = usize::MAX;
        }
        self.skipped[v] = true;
        self.recurse(pos + 1);
        self.skipped[v] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(sym: &str, p: [f64; 3]) -> AtomRecord {
        AtomRecord::new(Element::from_symbol(sym).unwrap(), p)
    }

    #[test]
    fn cc_single_at_152() {
        let atoms = [atom("C", [0.0; 3]), atom("C", [1.52, 0.0, 0.0])];
        let b = perceive_bonds(&atoms).unwrap();
        assert_eq!(b, vec![BondRecord::new(0, 1, BondOrder::Single)]);
    }

    #[test]
    fn cc_none_at_210() {
        let atoms = [atom("C", [0.0; 3]), atom("C", [2.10, 0.0, 0.0])];
        assert!(perceive_bonds(&atoms).unwrap().is_empty());
    }

    #[test]
    fn coincident_atoms_rejected() {
        let atoms = [atom("C", [0.0; 3]), atom("O", [0.2, 0.0, 0.0])];
        assert!(matches!(
            perceive_bonds(&atoms),
            Err(ChemError::DegenerateGeometry { a: 0, b: 1, .. })
        ));
    }

    #[test]
    fn benzene_kekule() {
        let atoms: Vec<AtomRecord> = (0..6)
            .map(|i| {
                let t = i as f64 * std::f64::consts::PI / 3.0;
                atom("C", [1.39 * t.cos(), 1.39 * t.sin(), 0.0])
            })
            .collect();
        let b = perceive_bonds(&atoms).unwrap();
        assert_eq!(b.len(), 6);
        let doubles = b.iter().filter(|x| x.order == BondOrder::Double).count();
        assert_eq!(doubles, 3);
    }

    #[test]
    fn ethyne_triple() {
        let atoms = [atom("C", [0.0; 3]), atom("C", [1.20, 0.0, 0.0])];
        let b = perceive_bonds(&atoms).unwrap();
        assert_eq!(b[0].order, BondOrder::Triple);
    }

    #[test]
    fn hydrogen_bonds_to_nearest_heavy_only() {
        let atoms = [
            atom("C", [0.0; 3]),
            atom("C", [1.52, 0.0, 0.0]),
            atom("H", [0.5, 0.95, 0.0]),
        ];
        let b = perceive_bonds(&atoms).unwrap();
        let h_bonds: Vec<_> = b.iter().filter(|x| x.a == 2 || x.b == 2).collect();
        assert_eq!(h_bonds.len(), 1);
        assert_eq!(h_bonds[0].other(2), 0);
    }
}
