//! Geometric ligand-pocket interaction profiler with seven interaction
//! types. Pocket chemistry (donors, acceptors, aromatic rings, cations)
//! comes from residue and atom names; ligand chemistry from perception.
//!
//! Water bridges and metal complexes are always zero: pockets carry no
//! waters or metal ions.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chemgraph::perceive;
use crate::elements::Element;
use crate::geom::{angle_deg, centroid, cross, dist, dot, norm, normalize, sub, Vec3};
use crate::structio::{AminoAcid, MoleculeGraph, PocketStructure};

pub const INTERACTION_LABELS: [&str; 7] = [
    "hydrophobic",
    "hydrogen_bond",
    "water_bridge",
    "pi_stack",
    "pi_cation",
    "halogen_bond",
    "metal_complex",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionType {
    Hydrophobic = 0,
    HydrogenBond = 1,
    WaterBridge = 2,
    PiStack = 3,
    PiCation = 4,
    HalogenBond = 5,
    MetalComplex = 6,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionProfile {
    pub counts: [u32; 7],
}

impl InteractionProfile {
    pub fn get(&self, t: InteractionType) -> u32 {
        self.counts[t as usize]
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| f64::from(c)).collect()
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProfileError {
    #[error("pocket has no heavy atoms")]
    EmptyPocket,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfilerThresholds {
    pub hydrophobic_distance: f64,
    pub hbond_distance: f64,
    pub hbond_donor_angle: f64,
    pub pistack_distance: f64,
    pub pistack_parallel_angle: f64,
    pub pistack_t_angle: f64,
    pub pication_distance: f64,
    pub halogen_distance: f64,
    pub halogen_angle: f64,
}

impl Default for ProfilerThresholds {
    fn default() -> Self {
        ProfilerThresholds {
            hydrophobic_distance: 4.0,
            hbond_distance: 3.5,
            hbond_donor_angle: 140.0,
            pistack_distance: 5.5,
            pistack_parallel_angle: 30.0,
            pistack_t_angle: 60.0,
            pication_distance: 6.0,
            halogen_distance: 4.0,
            halogen_angle: 140.0,
        }
    }
}

const BOND_TOLERANCE: f64 = 0.45;
const H_ATTACH: f64 = 1.25;

#[derive(Debug, Clone)]
struct Donor {
    atom: usize,
    pos: Vec3,
    hydrogens: Vec<Vec3>,
}

#[derive(Debug, Clone, Copy)]
struct Ring {
    center: Vec3,
    normal: Vec3,
}

/// Any two ring vectors spanning the plane give its normal; the pair with
/// the largest cross product is used so atom order does not matter.
fn plane_normal(points: &[Vec3]) -> Option<Vec3> {
    let c = centroid(points);
    let mut best = [0.0; 3];
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let x = cross(sub(points[i], c), sub(points[j], c));
            if norm(x) > norm(best) {
                best = x;
            }
        }
    }
    normalize(best)
}

fn ring_of(points: &[Vec3]) -> Option<Ring> {
    Some(Ring {
        center: centroid(points),
        normal: plane_normal(points)?,
    })
}

/// Pocket features, computed once per pocket.
#[derive(Debug, Clone)]
pub struct PocketFeatures {
    positions: Vec<Vec3>,
    residue_of: Vec<usize>,
    apolar: Vec<usize>,
    donors: Vec<Donor>,
    acceptors: Vec<usize>,
    rings: Vec<Ring>,
    cations: Vec<Vec3>,
}

fn donor_names(aa: AminoAcid) -> &'static [&'static str] {
    use AminoAcid::*;
    match aa {
        Arg => &["NE", "NH1", "NH2"],
        Asn => &["ND2"],
        Gln => &["NE2"],
        His => &["ND1", "NE2"],
        Lys => &["NZ"],
        Ser => &["OG"],
        Thr => &["OG1"],
        Trp => &["NE1"],
        Tyr => &["OH"],
        Cys => &["SG"],
        _ => &[],
    }
}

fn acceptor_names(aa: AminoAcid) -> &'static [&'static str] {
    use AminoAcid::*;
    match aa {
        Asp => &["OD1", "OD2"],
        Glu => &["OE1", "OE2"],
        Asn => &["OD1"],
        Gln => &["OE1"],
        His => &["ND1", "NE2"],
        Ser => &["OG"],
        Thr => &["OG1"],
        Tyr => &["OH"],
        Met => &["SD"],
        _ => &[],
    }
}

fn ring_names(aa: AminoAcid) -> &'static [&'static [&'static str]] {
    use AminoAcid::*;
    match aa {
        Phe | Tyr => &[&["CG", "CD1", "CE1", "CZ", "CE2", "CD2"]],
        His => &[&["CG", "ND1", "CE1", "NE2", "CD2"]],
        Trp => &[
            &["CG", "CD1", "NE1", "CE2", "CD2"],
            &["CD2", "CE2", "CZ2", "CH2", "CZ3", "CE3"],
        ],
        _ => &[],
    }
}

fn cation_names(aa: AminoAcid) -> &'static [&'static str] {
    match aa {
        AminoAcid::Lys => &["NZ"],
        AminoAcid::Arg => &["CZ"],
        _ => &[],
    }
}

impl PocketFeatures {
    pub fn new(pocket: &PocketStructure) -> Result<PocketFeatures, ProfileError> {
        let atoms = &pocket.atoms;
        let heavy: Vec<usize> = pocket.heavy_atom_indices();
        if heavy.is_empty() {
            return Err(ProfileError::EmptyPocket);
        }
        let hydrogens: Vec<usize> = (0..atoms.len()).filter(|&i| atoms[i].element.is_hydrogen()).collect();

        // covalent neighbors among heavy atoms, from distances
        let mut heavy_neighbors: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (k, &i) in heavy.iter().enumerate() {
            for &j in &heavy[k + 1..] {
                let limit = atoms[i].element.covalent_radius() + atoms[j].element.covalent_radius() + BOND_TOLERANCE;
                let d = dist(atoms[i].position, atoms[j].position);
                if d > 0.4 && d <= limit {
                    heavy_neighbors.entry(i).or_default().push(j);
                    heavy_neighbors.entry(j).or_default().push(i);
                }
            }
        }
        let apolar = heavy
            .iter()
            .copied()
            .filter(|&i| {
                atoms[i].element == Element::C
                    && heavy_neighbors
                        .get(&i)
                        .map_or(true, |ns| ns.iter().all(|&j| atoms[j].element == Element::C))
            })
            .collect();

        let name_of = |i: usize| pocket.atom_names[i].as_str();
        let aa_of = |i: usize| pocket.amino_acid_of(pocket.residue_of[i]);
        let polar = |i: usize| matches!(atoms[i].element.number(), 7 | 8);

        let mut donors = Vec::new();
        let mut acceptors = Vec::new();
        let mut cations = Vec::new();
        for &i in &heavy {
            let (aa, name) = (aa_of(i), name_of(i));
            let (is_donor, is_acceptor) = if aa == AminoAcid::Unknown {
                (polar(i), polar(i))
            } else {
                (
                    (name == "N" && aa != AminoAcid::Pro) || donor_names(aa).contains(&name),
                    name == "O" || name == "OXT" || acceptor_names(aa).contains(&name),
                )
            };
            if is_donor {
                let hs = hydrogens
                    .iter()
                    .map(|&h| atoms[h].position)
                    .filter(|&h| dist(h, atoms[i].position) <= H_ATTACH)
                    .collect();
                donors.push(Donor {
                    atom: i,
                    pos: atoms[i].position,
                    hydrogens: hs,
                });
            }
            if is_acceptor {
                acceptors.push(i);
            }
            if atoms[i].formal_charge > 0 || cation_names(aa).contains(&name) {
                cations.push(atoms[i].position);
            }
        }

        let mut rings = Vec::new();
        for (r, res) in pocket.residues.iter().enumerate() {
            for names in ring_names(res.amino_acid) {
                let pts: Vec<Vec3> = names
                    .iter()
                    .filter_map(|n| (0..atoms.len()).find(|&i| pocket.residue_of[i] == r && name_of(i) == *n))
                    .map(|i| atoms[i].position)
                    .collect();
                if pts.len() == names.len() {
                    rings.extend(ring_of(&pts));
                }
            }
        }

        Ok(PocketFeatures {
            positions: atoms.iter().map(|a| a.position).collect(),
            residue_of: pocket.residue_of.clone(),
            apolar,
            donors,
            acceptors,
            rings,
            cations,
        })
    }
}

struct LigandFeatures {
    positions: Vec<Vec3>,
    apolar: Vec<usize>,
    donors: Vec<Donor>,
    acceptors: Vec<usize>,
    halogens: Vec<(usize, Vec3)>,
    rings: Vec<Ring>,
    cations: Vec<Vec3>,
}

fn ligand_features(mol: &MoleculeGraph) -> LigandFeatures {
    let p = perceive(mol);
    let positions: Vec<Vec3> = p.graph.atoms.iter().map(|a| a.position).collect();
    let full_adj = mol.adjacency();
    let mut f = LigandFeatures {
        positions: positions.clone(),
        apolar: Vec::new(),
        donors: Vec::new(),
        acceptors: Vec::new(),
        halogens: Vec::new(),
        rings: Vec::new(),
        cations: Vec::new(),
    };
    for i in 0..p.len() {
        let e = p.element(i);
        let neighbors = || p.adjacency[i].iter().map(|&(j, _)| j);
        if e == Element::C && neighbors().all(|j| p.element(j) == Element::C) {
            f.apolar.push(i);
        }
        let polar = matches!(e.number(), 7 | 8);
        if polar && p.hydrogens[i] > 0 {
            let hs = full_adj[p.original_index[i]]
                .iter()
                .map(|&(j, _)| &mol.atoms[j])
                .filter(|a| a.element.is_hydrogen())
                .map(|a| a.position)
                .collect();
            f.donors.push(Donor {
                atom: i,
                pos: positions[i],
                hydrogens: hs,
            });
        }
        let acceptor = match e.number() {
            8 => true,
            7 => p.hydrogens[i] == 0 && p.charge(i) <= 0 && !(p.aromatic_atom[i] && p.degree(i) >= 3),
            _ => false,
        };
        if acceptor {
            f.acceptors.push(i);
        }
        if matches!(e.number(), 9 | 17 | 35 | 53) {
            if let Some(c) = neighbors().find(|&j| p.element(j) == Element::C) {
                f.halogens.push((i, positions[c]));
            }
        }
        if p.charge(i) > 0 {
            f.cations.push(positions[i]);
        }
    }
    for ring in p.aromatic_rings() {
        let pts: Vec<Vec3> = ring.iter().map(|&i| positions[i]).collect();
        f.rings.extend(ring_of(&pts));
    }
    f
}

fn donor_angle_ok(d: &Donor, acceptor: Vec3, min_angle: f64) -> bool {
    // without explicit hydrogens only the distance is checked
    d.hydrogens.is_empty() || d.hydrogens.iter().any(|&h| angle_deg(d.pos, h, acceptor) >= min_angle)
}

fn interplanar_angle(a: &Ring, b: &Ring) -> f64 {
    dot(a.normal, b.normal).abs().clamp(0.0, 1.0).acos().to_degrees()
}

pub fn profile_interactions(mol: &MoleculeGraph, pocket: &PocketStructure) -> Result<InteractionProfile, ProfileError> {
    Ok(profile_with(mol, &PocketFeatures::new(pocket)?, &ProfilerThresholds::default()))
}

pub fn profile_with(mol: &MoleculeGraph, pocket: &PocketFeatures, t: &ProfilerThresholds) -> InteractionProfile {
    let lig = ligand_features(mol);
    let mut counts = [0u32; 7];

    // hydrophobic: closest pocket atom per (ligand atom, residue), then
    // closest ligand atom per pocket atom
    let mut per_residue: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    for &i in &lig.apolar {
        for &j in &pocket.apolar {
            let d = dist(lig.positions[i], pocket.positions[j]);
            if d <= t.hydrophobic_distance {
                let e = per_residue.entry((i, pocket.residue_of[j])).or_insert((d, j));
                if d < e.0 {
                    *e = (d, j);
                }
            }
        }
    }
    let mut per_pocket_atom: BTreeMap<usize, f64> = BTreeMap::new();
    for &(d, j) in per_residue.values() {
        let e = per_pocket_atom.entry(j).or_insert(d);
        *e = e.min(d);
    }
    counts[InteractionType::Hydrophobic as usize] = per_pocket_atom.len() as u32;

    // hydrogen bonds, each (ligand atom, pocket atom) pair once
    let mut hbonds: BTreeSet<(usize, usize)> = BTreeSet::new();
    for d in &lig.donors {
        for &a in &pocket.acceptors {
            let pa = pocket.positions[a];
            if dist(d.pos, pa) <= t.hbond_distance && donor_angle_ok(d, pa, t.hbond_donor_angle) {
                hbonds.insert((d.atom, a));
            }
        }
    }
    for d in &pocket.donors {
        for &a in &lig.acceptors {
            let pa = lig.positions[a];
            if dist(d.pos, pa) <= t.hbond_distance && donor_angle_ok(d, pa, t.hbond_donor_angle) {
                hbonds.insert((a, d.atom));
            }
        }
    }
    counts[InteractionType::HydrogenBond as usize] = hbonds.len() as u32;

    let mut stacks = 0;
    for a in &lig.rings {
        for b in &pocket.rings {
            if dist(a.center, b.center) <= t.pistack_distance {
                let angle = interplanar_angle(a, b);
                if angle <= t.pistack_parallel_angle || angle >= t.pistack_t_angle {
                    stacks += 1;
                }
            }
        }
    }
    counts[InteractionType::PiStack as usize] = stacks;

    let ring_cation = |rings: &[Ring], cations: &[Vec3]| {
        rings
            .iter()
            .flat_map(|r| cations.iter().map(move |c| dist(r.center, *c)))
            .filter(|&d| d <= t.pication_distance)
            .count() as u32
    };
    counts[InteractionType::PiCation as usize] =
        ring_cation(&lig.rings, &pocket.cations) + ring_cation(&pocket.rings, &lig.cations);

    let mut halogen = 0;
    for &(x, c) in &lig.halogens {
        let px = lig.positions[x];
        for &a in &pocket.acceptors {
            let pa = pocket.positions[a];
            if dist(px, pa) <= t.halogen_distance && angle_deg(c, px, pa) >= t.halogen_angle {
                halogen += 1;
            }
        }
    }
    counts[InteractionType::HalogenBond as usize] = halogen;

    InteractionProfile { counts }
}
