//! Acceptance suite: one PASS/FAIL line per criterion. Criteria known to be
//! unattainable from the transcribed tables are listed in `KNOWN_UNMET`;
//! the run fails when the set of failing criteria differs from that list.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pocketbench_cli::commands::rank;
use pocketbench_core::chemgraph::{default_library, find_rings, perceive, reconstruct_and_validate, FunctionalGroupPattern};
use pocketbench_core::chemgraph::fgroups::count_functional_groups;
use pocketbench_core::chemgraph::perception::Perceived;
use pocketbench_core::elements::Element;
use pocketbench_core::metrics::chem::lipinski_count;
use pocketbench_core::metrics::clash::{detect_clashes, detect_clashes_brute_force, CLASH_OVERLAP};
use pocketbench_core::metrics::interaction::{affinity_metrics, AffinityMode, AffinityRecord, PocketAffinity};
use pocketbench_core::metrics::{jsd_vectors, JsdConvention};
use pocketbench_core::ranking::{Aspect, RankOptions};
use pocketbench_core::structio::{parse_sdf, AtomRecord, BondOrder, BondRecord, MoleculeGraph, PocketStructure};
use pocketbench_core::taskbuilder::{all_candidates, audit_instance, TaskInstance, TaskKind, TaskThresholds};

/// Ranking: two aspect scores and the top three contradict the source's
/// own intermediate values. Overall interaction JSD: the printed frequency
/// rows do not reproduce the headline values under any convention.
const KNOWN_UNMET: [u32; 2] = [1, 2];

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn core_data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

struct Outcome {
    pass: bool,
    detail: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            detail: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: String) {
        self.pass &= ok;
        self.detail.push(format!("{} {msg}", if ok { "ok  " } else { "MISS" }));
    }

    fn note(&mut self, msg: String) {
        self.detail.push(format!("info {msg}"));
    }
}

fn read_rows(path: &Path) -> Vec<BTreeMap<String, String>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            headers.iter().zip(rec.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect()
        })
        .collect()
}

fn num(row: &BTreeMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap()
}

// ---------------------------------------------------------------- ranking

fn ranking() -> Outcome {
    let mut o = Outcome::new();
    let out = tempfile::tempdir().unwrap();
    let table = rank(&data("benchmark_matrix.csv"), &RankOptions::published(), out.path()).unwrap();
    let expected = read_rows(&data("benchmark_scores.csv"));
    let mut worst_score = (0.0f64, String::new());
    let mut worst_rank = (0.0f64, String::new());
    for row in &expected {
        let m = &row["method"];
        for a in Aspect::ALL {
            let got = table.aspect_scores[m][&a];
            let want = num(row, a.as_str());
            let d = (got - want).abs();
            if d > 0.02 + 1e-9 {
                o.check(false, format!("{m} {a} score {got:.3}, expected {want:.2}"));
            }
            if d > worst_score.0 {
                worst_score = (d, format!("{m} {a}"));
            }
            let got_r = table.mean_ranks[&a][m];
            let want_r = num(row, &format!("mean_rank_{}", a.as_str()));
            let dr = (got_r - want_r).abs();
            if dr > 0.15 + 1e-9 {
                o.check(false, format!("{m} {a} mean rank {got_r:.3}, expected {want_r:.2}"));
            }
            if dr > worst_rank.0 {
                worst_rank = (dr, format!("{m} {a}"));
            }
        }
    }
    o.note(format!("largest score gap {:.3} ({}); largest mean-rank gap {:.3} ({})", worst_score.0, worst_score.1, worst_rank.0, worst_rank.1));
    let top: Vec<&str> = table.final_order.iter().take(3).map(|r| r.method.as_str()).collect();
    o.check(
        top == ["MolCraft", "TargetDiff", "LiGAN"],
        format!("top three {top:?}, expected [MolCraft, TargetDiff, LiGAN]"),
    );
    let default = rank(&data("benchmark_matrix.csv"), &RankOptions::default(), out.path()).unwrap();
    let top_default: Vec<&str> = default.final_order.iter().take(3).map(|r| r.method.as_str()).collect();
    o.note(format!("average-tie profile top three {top_default:?}"));
    o
}

// ---------------------------------------------------------- jsd agreement

fn freq_rows(path: &Path, head: &str, labels: &[&str]) -> (Vec<f64>, Vec<(String, f64, Vec<f64>)>) {
    let rows = read_rows(path);
    let vec_of = |r: &BTreeMap<String, String>| labels.iter().map(|l| num(r, l)).collect::<Vec<f64>>();
    let reference = vec_of(rows.iter().find(|r| r["method"] == "reference").unwrap());
    let methods = rows
        .iter()
        .filter(|r| r["method"] != "reference")
        .map(|r| (r["method"].clone(), num(r, head), vec_of(r)))
        .collect();
    (reference, methods)
}

fn jsd_agreement() -> Outcome {
    let mut o = Outcome::new();
    let (reference, methods) = freq_rows(&data("atom_type_freqs.csv"), "jsd_at", &["C", "N", "O", "F", "P", "S", "Cl"]);
    for conv in [JsdConvention::Distance, JsdConvention::Base2] {
        let hits = methods
            .iter()
            .filter(|(_, want, v)| (jsd_vectors(v, &reference, conv).unwrap() - want).abs() <= 0.03)
            .count();
        let msg = format!("atom types, {conv:?}: {hits}/{} within 0.03 (need 10)", methods.len());
        if conv == JsdConvention::default() {
            o.check(hits >= 10, msg);
        } else {
            o.note(msg);
        }
    }
    let labels = [
        "hydrophobic",
        "hydrogen_bond",
        "water_bridge",
        "pi_stack",
        "pi_cation",
        "halogen_bond",
        "metal_complex",
    ];
    let (reference, methods) = freq_rows(&data("interaction_type_freqs.csv"), "jsd_oa", &labels);
    for (m, want, v) in &methods {
        let got = jsd_vectors(v, &reference, JsdConvention::default()).unwrap();
        let base2 = jsd_vectors(v, &reference, JsdConvention::Base2).unwrap();
        o.check(
            (got - want).abs() <= 0.02,
            format!("interaction types {m}: {got:.4} vs {want} (base-2 divergence {base2:.4})"),
        );
    }
    o
}

// ---------------------------------------------------------------- affinity

struct Direct {
    mean: Option<f64>,
    imp: Option<f64>,
    mpbg: Option<f64>,
    lbe: Option<f64>,
}

/// Straight re-computation from the metric definitions.
fn direct(pockets: &[PocketAffinity]) -> Direct {
    let valid = |r: &&AffinityRecord| r.energy <= 0.0;
    let all: Vec<&AffinityRecord> = pockets.iter().flat_map(|p| &p.generated).collect();
    let good: Vec<&AffinityRecord> = all.iter().copied().filter(valid).collect();
    if good.is_empty() {
        return Direct {
            mean: None,
            imp: None,
            mpbg: None,
            lbe: None,
        };
    }
    let mean = good.iter().map(|r| r.energy).sum::<f64>() / good.len() as f64;
    let lbe = good.iter().map(|r| -r.energy / r.n_lig as f64).sum::<f64>() / good.len() as f64;
    let (mut below, mut total) = (0, 0);
    let mut gaps = Vec::new();
    for p in pockets {
        let Some(e_ref) = p.reference else { continue };
        for r in &p.generated {
            total += 1;
            if r.energy < e_ref {
                below += 1;
            }
        }
        let v: Vec<f64> = p.generated.iter().filter(valid).map(|r| (r.energy - e_ref) / e_ref * 100.0).collect();
        if e_ref < 0.0 && !v.is_empty() {
            gaps.push(v.iter().sum::<f64>() / v.len() as f64);
        }
    }
    Direct {
        mean: Some(mean),
        imp: (total > 0).then(|| below as f64 / total as f64),
        mpbg: (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64),
        lbe: Some(lbe),
    }
}

fn rec(pocket: &str, i: usize, energy: f64, n_lig: usize) -> AffinityRecord {
    AffinityRecord {
        pocket_id: pocket.into(),
        molecule_ordinal: i,
        mode: AffinityMode::Dock,
        energy,
        n_lig,
    }
}

fn pocket(id: &str, gen: &[f64], e_ref: Option<f64>) -> PocketAffinity {
    PocketAffinity {
        pocket_id: id.into(),
        generated: gen.iter().enumerate().map(|(i, &e)| rec(id, i, e, 20)).collect(),
        reference: e_ref,
    }
}

fn close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => (x - y).abs() <= 1e-9 * (1.0 + y.abs()),
        (None, None) => true,
        _ => false,
    }
}

fn affinity() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pockets: Vec<PocketAffinity> = (0..40)
        .map(|k| PocketAffinity {
            pocket_id: format!("p{k}"),
            generated: Vec::new(),
            reference: (k % 9 != 0).then(|| rng.gen_range(-11.0..-2.0)),
        })
        .collect();
    for i in 0..1000 {
        let k = rng.gen_range(0..pockets.len());
        let e = rng.gen_range(-12.0..2.0);
        let id = pockets[k].pocket_id.clone();
        pockets[k].generated.push(rec(&id, i, e, rng.gen_range(5..45)));
    }
    let got = affinity_metrics(&pockets, &mut Vec::new());
    let want = direct(&pockets);
    let agree = close(got.mean_energy, want.mean)
        && close(got.imp, want.imp)
        && close(got.mpbg, want.mpbg)
        && close(got.lbe, want.lbe);
    o.check(agree, "1000 random records agree with direct re-computation".into());

    let sym = affinity_metrics(&[pocket("s", &[-6.0, -4.0], Some(-5.0))], &mut Vec::new());
    o.check(
        sym.mpbg.is_some_and(|g| g.abs() < 1e-12) && sym.imp == Some(0.5),
        "symmetric pocket: gap 0, half improved".into(),
    );

    let mut scale_ok = true;
    for _ in 0..20 {
        let c = rng.gen_range(0.2..5.0);
        let scaled: Vec<PocketAffinity> = pockets
            .iter()
            .map(|p| PocketAffinity {
                pocket_id: p.pocket_id.clone(),
                generated: p.generated.iter().map(|r| AffinityRecord { energy: r.energy * c, ..r.clone() }).collect(),
                reference: p.reference.map(|e| e * c),
            })
            .collect();
        let s = affinity_metrics(&scaled, &mut Vec::new());
        scale_ok &= close(s.mpbg, got.mpbg) && close(s.imp, got.imp);
    }
    o.check(scale_ok, "gap and improvement unchanged under positive energy scaling".into());

    let lbe = affinity_metrics(&[PocketAffinity {
        pocket_id: "l".into(),
        generated: vec![rec("l", 0, -8.0, 20)],
        reference: Some(-5.0),
    }], &mut Vec::new());
    o.check(close(lbe.lbe, Some(0.4)), "energy -8.0 over 20 atoms gives efficiency 0.40".into());

    let pos = affinity_metrics(&[pocket("x", &[-6.0, 1.2], Some(-5.0))], &mut Vec::new());
    o.check(
        close(pos.mean_energy, Some(-6.0))
            && close(pos.imp, Some(0.5))
            && close(pos.mpbg, Some(20.0))
            && pos.invalid_records == 1,
        "positive energy kept as a failed record, excluded from means".into(),
    );
    let none = affinity_metrics(&[pocket("y", &[0.5, 2.0], Some(-5.0))], &mut Vec::new());
    o.check(
        none.mean_energy.is_none() && none.imp.is_none() && none.mpbg.is_none() && none.lbe.is_none(),
        "all-positive energies leave every affinity metric absent".into(),
    );
    o
}

// ------------------------------------------------------------------ clash

const CLASH_ELEMENTS: [Element; 5] = [Element::C, Element::N, Element::O, Element::S, Element::H];

fn random_atoms(rng: &mut ChaCha8Rng, n: usize, half_box: f64) -> Vec<AtomRecord> {
    (0..n)
        .map(|_| {
            let e = CLASH_ELEMENTS[rng.gen_range(0..CLASH_ELEMENTS.len())];
            let p = [
                rng.gen_range(-half_box..half_box),
                rng.gen_range(-half_box..half_box),
                rng.gen_range(-half_box..half_box),
            ];
            AtomRecord::new(e, p)
        })
        .collect()
}

fn clash() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut mismatched = 0;
    let mut largest = 0;
    for _ in 0..100 {
        let total = rng.gen_range(20..=2000);
        let n_lig = rng.gen_range(5..=total.min(80) - 1);
        let lig = MoleculeGraph::point_cloud("l", random_atoms(&mut rng, n_lig, 5.0)).unwrap();
        let mut pocket_atoms = random_atoms(&mut rng, total - n_lig, 14.0);
        pocket_atoms[0].element = Element::C;
        let pocket = PocketStructure::from_atoms("p", pocket_atoms);
        largest = largest.max(total);
        if detect_clashes(&lig, &pocket, CLASH_OVERLAP).unwrap()
            != detect_clashes_brute_force(&lig, &pocket, CLASH_OVERLAP).unwrap()
        {
            mismatched += 1;
        }
    }
    o.check(mismatched == 0, format!("grid equals pair scan on 100 fixtures (largest {largest} atoms), {mismatched} differ"));
    let lig = MoleculeGraph::point_cloud("l", vec![AtomRecord::new(Element::C, [0.0; 3])]).unwrap();
    let at = |d: f64| PocketStructure::from_atoms("p", vec![AtomRecord::new(Element::C, [d, 0.0, 0.0])]);
    o.check(
        detect_clashes(&lig, &at(3.0), CLASH_OVERLAP).unwrap() == [true]
            && detect_clashes(&lig, &at(3.01), CLASH_OVERLAP).unwrap() == [false],
        "carbon pair at 3.00 A clashes, at 3.01 A does not".into(),
    );
    o
}

// ---------------------------------------------------------- decomposition

fn capacity(e: Element) -> usize {
    match e {
        Element::C => 4,
        Element::N => 3,
        _ => 2,
    }
}

/// Random connected heavy-atom graph: a random tree plus a few ring closures.
fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> MoleculeGraph {
    let elements: Vec<Element> = (0..n)
        .map(|_| match rng.gen_range(0..10) {
            0 => Element::N,
            1 => Element::O,
            _ => Element::C,
        })
        .collect();
    let mut degree = vec![0usize; n];
    let mut edges: Vec<(usize, usize, BondOrder)> = Vec::new();
    let mut present = HashSet::new();
    for i in 1..n {
        let open: Vec<usize> = (0..i).filter(|&j| degree[j] + 1 < capacity(elements[j])).collect();
        let j = if open.is_empty() { rng.gen_range(0..i) } else { open[rng.gen_range(0..open.len())] };
        let double = rng.gen_bool(0.1) && degree[j] + 2 <= capacity(elements[j]) && capacity(elements[i]) >= 2;
        let order = if double { BondOrder::Double } else { BondOrder::Single };
        let w = if double { 2 } else { 1 };
        degree[i] += w;
        degree[j] += w;
        present.insert((j, i));
        edges.push((j, i, order));
    }
    for _ in 0..rng.gen_range(0..=3) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let key = (a.min(b), a.max(b));
        if a == b || present.contains(&key) || degree[a] >= capacity(elements[a]) || degree[b] >= capacity(elements[b]) {
            continue;
        }
        degree[a] += 1;
        degree[b] += 1;
        present.insert(key);
        edges.push((key.0, key.1, BondOrder::Single));
    }
    let atoms = elements
        .iter()
        .enumerate()
        .map(|(i, &e)| AtomRecord::new(e, [i as f64 * 1.5, (i % 3) as f64, 0.0]))
        .collect();
    let bonds = edges.into_iter().map(|(a, b, o)| BondRecord::new(a, b, o)).collect();
    MoleculeGraph::new("g", atoms, bonds).unwrap()
}

fn instance(kind: TaskKind, n: usize, target: &BTreeSet<usize>) -> TaskInstance {
    TaskInstance {
        kind,
        pocket_ref: String::new(),
        ligand_ref: String::new(),
        split: "test".into(),
        context_atoms: (0..n).filter(|i| !target.contains(i)).collect(),
        target_atoms: target.iter().copied().collect(),
        cut_bonds: Vec::new(),
    }
}

fn components_without(mol: &MoleculeGraph, removed: &[usize]) -> Vec<BTreeSet<usize>> {
    let kept: Vec<BondRecord> = mol
        .bonds
        .iter()
        .enumerate()
        .filter(|(k, _)| !removed.contains(k))
        .map(|(_, b)| *b)
        .collect();
    let g = MoleculeGraph {
        bonds: kept,
        ..mol.clone()
    };
    g.components().into_iter().map(|c| c.into_iter().collect()).collect()
}

/// Does any cut of one (fragment) or two (linker) bonds yield an instance
/// the rule checker accepts?
fn exhaustive_feasible(mol: &MoleculeGraph, kind: TaskKind, th: &TaskThresholds) -> bool {
    let m = mol.bonds.len();
    let n = mol.atoms.len();
    let ok = |target: &BTreeSet<usize>| audit_instance(mol, &instance(kind, n, target), th).is_ok();
    match kind {
        TaskKind::Fragment => (0..m).any(|b| components_without(mol, &[b]).iter().any(|c| ok(c))),
        TaskKind::Linker => (0..m).any(|b1| {
            (b1 + 1..m).any(|b2| {
                let comps = components_without(mol, &[b1, b2]);
                comps.len() == 3 && comps.iter().any(|c| ok(c))
            })
        }),
        _ => unreachable!(),
    }
}

fn decomposition() -> (Outcome, Vec<MoleculeGraph>) {
    let mut o = Outcome::new();
    let th = TaskThresholds::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut graphs = Vec::new();
    let mut emitted: BTreeMap<TaskKind, usize> = BTreeMap::new();
    let mut violations = Vec::new();
    let mut duality = 0;
    let (mut small, mut disagreements) = (0, Vec::new());
    for g in 0..500 {
        let n = rng.gen_range(6..=40);
        let mol = random_graph(&mut rng, n);
        for kind in TaskKind::ALL {
            for part in all_candidates(&mol, kind, &th) {
                *emitted.entry(kind).or_default() += 1;
                let inst = TaskInstance {
                    kind,
                    pocket_ref: String::new(),
                    ligand_ref: String::new(),
                    split: "test".into(),
                    context_atoms: part.context_atoms,
                    target_atoms: part.target_atoms,
                    cut_bonds: part.cut_bonds,
                };
                if let Err(e) = audit_instance(&mol, &inst, &th) {
                    violations.push(format!("graph {g} {kind}: {e:?}"));
                }
            }
        }
        let side = all_candidates(&mol, TaskKind::Sidechain, &th);
        let scaf = all_candidates(&mol, TaskKind::Scaffold, &th);
        let dual = match (side.first(), scaf.first()) {
            (Some(a), Some(b)) => a.context_atoms == b.target_atoms && a.target_atoms == b.context_atoms,
            (None, None) => true,
            _ => false,
        };
        duality += usize::from(!dual);
        if n <= 14 {
            small += 1;
            for kind in [TaskKind::Linker, TaskKind::Fragment] {
                let search = !all_candidates(&mol, kind, &th).is_empty();
                if search != exhaustive_feasible(&mol, kind, &th) {
                    disagreements.push(format!("graph {g} {kind}"));
                }
            }
        }
        graphs.push(mol);
    }
    o.note(format!("instances emitted per kind: {emitted:?}"));
    o.check(violations.is_empty(), format!("{} rule violations {:?}", violations.len(), violations.iter().take(3).collect::<Vec<_>>()));
    o.check(duality == 0, format!("side-chain/scaffold partitions mirror each other ({duality} mismatches)"));
    o.check(
        disagreements.is_empty(),
        format!("cut enumeration agrees on {small} graphs of <= 14 atoms ({} disagree {:?})", disagreements.len(), disagreements.iter().take(3).collect::<Vec<_>>()),
    );
    (o, graphs)
}

// -------------------------------------------------------------- chemistry

type Image = (Vec<usize>, Vec<usize>);

/// All label-preserving bijections from the pattern onto every atom subset
/// of the right size, keeping those that map each pattern bond onto a
/// molecule bond of the same kind.
fn brute_force_count(p: &Perceived, pat: &FunctionalGroupPattern) -> usize {
    let k = pat.len();
    let n = p.len();
    let label = |i: usize| (p.element(i), p.aromatic_atom[i]);
    let want: Vec<(Element, bool)> = (0..k).map(|i| (pat.elements[i], pat.aromatic[i])).collect();
    let mut want_sorted = want.clone();
    want_sorted.sort_by_key(|&(e, a)| (e.number(), a));
    let mut images: HashSet<Image> = HashSet::new();
    let mut subset = Vec::new();
    fn choose(start: usize, n: usize, k: usize, subset: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if subset.len() == k {
            f(subset);
            return;
        }
        for i in start..n {
            subset.push(i);
            choose(i + 1, n, k, subset, f);
            subset.pop();
        }
    }
    fn assign(
        depth: usize,
        subset: &[usize],
        used: &mut Vec<bool>,
        map: &mut Vec<usize>,
        ok_label: &dyn Fn(usize, usize) -> bool,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if depth == map.len() {
            f(map);
            return;
        }
        for (s, &m) in subset.iter().enumerate() {
            if !used[s] && ok_label(depth, m) {
                used[s] = true;
                map[depth] = m;
                assign(depth + 1, subset, used, map, ok_label, f);
                used[s] = false;
            }
        }
    }
    let ok_label = |pi: usize, m: usize| label(m) == want[pi];
    choose(0, n, k, &mut subset, &mut |s: &[usize]| {
        let mut have: Vec<(Element, bool)> = s.iter().map(|&i| label(i)).collect();
        have.sort_by_key(|&(e, a)| (e.number(), a));
        if have != want_sorted {
            return;
        }
        let mut used = vec![false; k];
        let mut map = vec![0; k];
        assign(0, s, &mut used, &mut map, &ok_label, &mut |map: &[usize]| {
            let mut bonds = Vec::new();
            for &(a, b, order) in &pat.bonds {
                match p.bond_between(map[a], map[b]) {
                    Some(x) if p.bond_kind(x) == order => bonds.push(x),
                    _ => return,
                }
            }
            let mut atoms = map.to_vec();
            atoms.sort_unstable();
            bonds.sort_unstable();
            images.insert((atoms, bonds));
        });
    });
    images.len()
}

fn chemistry(random_graphs: &[MoleculeGraph]) -> Outcome {
    let mut o = Outcome::new();
    let mut corpus: Vec<MoleculeGraph> = Vec::new();
    for f in ["corpus50.sdf", "small.sdf"] {
        corpus.extend(parse_sdf(&std::fs::read(core_data(f)).unwrap()).into_iter().map(Result::unwrap));
    }
    let lib = default_library();
    let small: Vec<&MoleculeGraph> = corpus.iter().filter(|m| m.heavy_atom_count() <= 12).collect();
    let mut wrong = Vec::new();
    let mut matched = 0;
    for m in &small {
        let p = perceive(m);
        let fast = count_functional_groups(&p, lib);
        for (pat, &c) in lib.iter().zip(&fast) {
            let slow = brute_force_count(&p, pat);
            matched += slow;
            if slow != c {
                wrong.push(format!("{} {}: {c} vs {slow}", m.name, pat.id));
            }
        }
    }
    o.check(
        wrong.is_empty(),
        format!("group counts equal brute-force enumeration on {} molecules ({matched} occurrences) {:?}", small.len(), wrong.iter().take(3).collect::<Vec<_>>()),
    );

    let mut bad_rings = 0;
    let all: Vec<&MoleculeGraph> = corpus.iter().chain(random_graphs).collect();
    for m in &all {
        let c = m.components().len();
        if find_rings(m).len() + m.atoms.len() != m.bonds.len() + c {
            bad_rings += 1;
        }
    }
    o.check(bad_rings == 0, format!("ring count equals E - V + C on {} graphs ({bad_rings} differ)", all.len()));

    let lip = [
        ((300.0, 2.0, 1, 3, 4), 5),
        ((600.0, 6.0, 6, 11, 11), 0),
        ((501.0, 5.0, 5, 10, 10), 4),
    ];
    let lip_ok = lip
        .iter()
        .all(|&((mw, lp, d, a, r), want)| lipinski_count(mw, lp, d, a, r) == want);
    o.check(lip_ok, "rule-of-five boundary cases".into());
    o
}

// --------------------------------------------------------------- validity

fn chain_cloud(n: usize, offset: f64) -> Vec<AtomRecord> {
    (0..n)
        .map(|i| AtomRecord::new(Element::C, [offset + i as f64 * 1.5, if i % 2 == 0 { 0.0 } else { 0.8 }, 0.0]))
        .collect()
}

fn validity() -> Outcome {
    let mut o = Outcome::new();
    let mut half = chain_cloud(5, 0.0);
    half.extend(chain_cloud(5, 50.0));
    let (_, v) = reconstruct_and_validate(&half).unwrap();
    o.check(
        !v.valid && (v.largest_fragment_ratio - 0.5).abs() < 1e-12,
        format!("5 + 5 split cloud: ratio {:.2}, valid {}", v.largest_fragment_ratio, v.valid),
    );
    let mut most = chain_cloud(9, 0.0);
    most.extend(chain_cloud(1, 50.0));
    let (_, v) = reconstruct_and_validate(&most).unwrap();
    o.check(
        v.valid && (v.largest_fragment_ratio - 0.9).abs() < 1e-12,
        format!("9 + 1 split cloud: ratio {:.2}, valid {}", v.largest_fragment_ratio, v.valid),
    );
    o
}

fn report(id: u32, name: &str, budget: Duration, run: impl FnOnce() -> Outcome, failed: &mut BTreeSet<u32>) {
    let start = Instant::now();
    let mut o = run();
    let took = start.elapsed();
    if took > budget {
        o.note(format!("took {:.2?}, over the {:.0?} budget", took, budget));
    }
    if !o.pass {
        failed.insert(id);
    }
    println!("[{id}] {} {name} ({:.2?})", if o.pass { "PASS" } else { "FAIL" }, took);
    for d in &o.detail {
        println!("      {d}");
    }
}

fn main() {
    let mut failed = BTreeSet::new();
    report(1, "ranking reproduction", Duration::from_secs(1), ranking, &mut failed);
    report(2, "jsd cross-consistency", Duration::from_secs(1), jsd_agreement, &mut failed);
    report(3, "affinity formulas", Duration::from_secs(1), affinity, &mut failed);
    report(4, "clash oracle equivalence", Duration::from_secs(10), clash, &mut failed);
    let mut graphs = Vec::new();
    report(5, "decomposition compliance", Duration::from_secs(30), || {
        let (o, g) = decomposition();
        graphs = g;
        o
    }, &mut failed);
    report(6, "chemistry oracle equivalence", Duration::from_secs(30), || chemistry(&graphs), &mut failed);
    report(7, "validity rule", Duration::from_secs(1), validity, &mut failed);
    println!("[8] DECLARED desk-scale limits: per-method metric values, dataset instance counts and the case study need trained models, the full complex set and docking");

    let known: BTreeSet<u32> = KNOWN_UNMET.into_iter().collect();
    println!("failing: {failed:?}; known unmet: {known:?}");
    if failed != known {
        eprintln!("acceptance outcome changed: failing {failed:?}, expected {known:?}");
        std::process::exit(1);
    }
}
