//! Batch evaluation over a pocket manifest.
//!
//! Manifest: JSON lines, one pocket per line:
//!
//! ```text
//! {"pocket_id": "1abc", "pocket": "1abc_pocket.pdb",
//!  "reference": "1abc_ligand.sdf", "generated": "1abc_gen.sdf"}
//! ```
//!
//! Relative paths resolve against the manifest's directory. Each pocket is
//! one work unit; a failing pocket is recorded and the batch goes on.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::{Condvar, Mutex};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Deserialize;

use pocketbench_core::chemgraph::{default_library, largest_fragment, reconstruct_with, ValidityOptions};
use pocketbench_core::metrics::chem::{chem_metrics, chem_profile, parse_property_csv, ChemProfile, MolProperties};
use pocketbench_core::metrics::chem::{fetch_external_properties, PropertyProvider};
use pocketbench_core::metrics::clash::{detect_clashes, ClashReport};
use pocketbench_core::metrics::geometry::{geometry_jsd_metrics_with, GeometryBins};
use pocketbench_core::metrics::interaction::{
    affinity_metrics, interaction_distribution_metrics, profile_with, AffinityMode, AffinityRecord, EnergySource,
    Ordinal, PocketAffinity, PocketFeatures, PocketProfiles, ProfilerThresholds,
};
use pocketbench_core::metrics::substructure::{
    substructure_metrics, MaeMode, PocketCounts, SubstructureCounts, SubstructureOptions,
};
use pocketbench_core::metrics::JsdConvention;
use pocketbench_core::ranking::Aspect;
use pocketbench_core::structio::{
    parse_pdb_pocket, parse_sdf, write_report, MetricReport, MoleculeGraph, ReportFormat,
};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub pocket_id: String,
    pub pocket: PathBuf,
    pub reference: PathBuf,
    pub generated: PathBuf,
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out: Vec<ManifestEntry> = Vec::new();
    let mut seen = BTreeSet::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut e: ManifestEntry =
            serde_json::from_str(line).with_context(|| format!("{} line {}", path.display(), k + 1))?;
        if !seen.insert(e.pocket_id.clone()) {
            bail!("{} line {}: pocket id '{}' listed twice", path.display(), k + 1, e.pocket_id);
        }
        for p in [&mut e.pocket, &mut e.reference, &mut e.generated] {
            *p = base.join(&*p);
        }
        out.push(e);
    }
    if out.is_empty() {
        bail!("manifest {} lists no pockets", path.display());
    }
    Ok(out)
}

/// Everything a run needs, already resolved from config and flags.
#[derive(Debug, Clone)]
pub struct EvalSettings {
    pub method: String,
    pub aspects: BTreeSet<Aspect>,
    pub jobs: usize,
    pub convention: JsdConvention,
    pub mae_mode: MaeMode,
    pub validity: ValidityOptions,
    pub clash_overlap: f64,
    pub profiler: ProfilerThresholds,
    pub bins: GeometryBins,
    pub energy: Option<EnergySource>,
    pub modes: Vec<AffinityMode>,
    pub dock_jobs: usize,
    pub properties: PropertyProvider,
}

/// Counting semaphore bounding concurrent docking processes.
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Gate {
    fn new(n: usize) -> Gate {
        Gate {
            free: Mutex::new(n.max(1)),
            cv: Condvar::new(),
        }
    }

    fn with<T>(&self, f: impl FnOnce() -> T) -> T {
        {
            let mut free = self.free.lock().unwrap();
            while *free == 0 {
                free = self.cv.wait(free).unwrap();
            }
            *free -= 1;
        }
        let out = f();
        *self.free.lock().unwrap() += 1;
        self.cv.notify_one();
        out
    }
}

/// Per-pocket intermediate data, kept for the aggregate.
#[derive(Debug, Clone, Default)]
struct PocketData {
    pocket_id: String,
    records: usize,
    valid: usize,
    generated: Vec<MoleculeGraph>,
    reference: Vec<MoleculeGraph>,
    counts: PocketCounts,
    chem: Vec<ChemProfile>,
    clash: ClashReport,
    affinity: BTreeMap<AffinityMode, PocketAffinity>,
    profiles: PocketProfiles,
    warnings: Vec<String>,
    /// Aspects that could not be fully computed.
    incomplete: BTreeSet<String>,
}

pub struct EvalOutcome {
    pub pockets: Vec<MetricReport>,
    pub aggregate: MetricReport,
    pub succeeded: usize,
}

/// Bonded graph to analyze: the record's own bonds when it has any,
/// otherwise the reconstruction, reduced to its largest fragment.
fn analyzed(record: &MoleculeGraph, rebuilt: MoleculeGraph) -> MoleculeGraph {
    let base = if record.bonds.is_empty() {
        MoleculeGraph {
            name: record.name.clone(),
            ..rebuilt
        }
    } else {
        record.clone()
    };
    largest_fragment(&base)
}

fn load_reference(path: &Path, opts: &ValidityOptions) -> Result<MoleculeGraph, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("reference {}: {e}", path.display()))?;
    let mol = parse_sdf(&bytes)
        .into_iter()
        .next()
        .ok_or_else(|| format!("reference {}: no molecule", path.display()))?
        .map_err(|e| format!("reference {}: {e}", path.display()))?;
    if !mol.bonds.is_empty() {
        return Ok(largest_fragment(&mol));
    }
    let (rebuilt, _) = reconstruct_with(&mol.atoms, opts).map_err(|e| format!("reference {}: {e}", path.display()))?;
    Ok(analyzed(&mol, rebuilt))
}

fn properties_for(
    entry: &ManifestEntry,
    mols: &[(usize, MoleculeGraph)],
    provider: &PropertyProvider,
    sidecar: Option<&str>,
) -> Result<Vec<MolProperties>, String> {
    match (provider, sidecar) {
        (PropertyProvider::Sidecar(_), Some(text)) => {
            // sidecar ordinals are record positions in the generated SDF
            let table = parse_property_csv(text, Some(&entry.pocket_id)).map_err(|e| format!("properties: {e}"))?;
            Ok(mols.iter().map(|(ord, _)| table.get(ord).copied().unwrap_or_default()).collect())
        }
        _ => {
            let graphs: Vec<MoleculeGraph> = mols.iter().map(|(_, m)| m.clone()).collect();
            fetch_external_properties(&graphs, provider, Some(&entry.pocket_id)).map_err(|e| format!("properties: {e}"))
        }
    }
}

fn evaluate_pocket(
    entry: &ManifestEntry,
    s: &EvalSettings,
    gate: &Gate,
    sidecar: Option<&str>,
) -> Result<PocketData, String> {
    let pocket_bytes = std::fs::read(&entry.pocket).map_err(|e| format!("pocket {}: {e}", entry.pocket.display()))?;
    let pocket = parse_pdb_pocket(&pocket_bytes).map_err(|e| format!("pocket {}: {e}", entry.pocket.display()))?;
    let reference = load_reference(&entry.reference, &s.validity)?;
    let gen_bytes =
        std::fs::read(&entry.generated).map_err(|e| format!("generated {}: {e}", entry.generated.display()))?;
    let records = parse_sdf(&gen_bytes);

    let mut d = PocketData {
        pocket_id: entry.pocket_id.clone(),
        records: records.len(),
        ..Default::default()
    };
    let mut mols: Vec<(usize, MoleculeGraph)> = Vec::new();
    for (ordinal, rec) in records.into_iter().enumerate() {
        let rec = match rec {
            Ok(m) => m,
            Err(e) => {
                d.warnings.push(format!("generated {e}"));
                continue;
            }
        };
        match reconstruct_with(&rec.atoms, &s.validity) {
            Ok((rebuilt, verdict)) if verdict.valid => mols.push((ordinal, analyzed(&rec, rebuilt))),
            Ok(_) => {}
            Err(e) => d.warnings.push(format!("record {}: {e}", ordinal + 1)),
        }
    }
    d.valid = mols.len();
    if mols.is_empty() {
        d.warnings.push("no valid generated molecule".into());
    }

    if s.aspects.contains(&Aspect::Substructure) {
        let lib = default_library();
        d.counts = PocketCounts {
            generated: mols.iter().map(|(_, m)| SubstructureCounts::of(m, lib)).collect(),
            reference: vec![SubstructureCounts::of(&reference, lib)],
        };
    }

    if s.aspects.contains(&Aspect::Chemical) {
        let props = match properties_for(entry, &mols, &s.properties, sidecar) {
            Ok(p) => p,
            Err(e) => {
                d.warnings.push(format!("{e}; QED and SA absent"));
                d.incomplete.insert("chemical".into());
                vec![MolProperties::default(); mols.len()]
            }
        };
        d.chem = mols.iter().zip(props).map(|((_, m), p)| chem_profile(m, p)).collect();
    }

    if s.aspects.contains(&Aspect::Geometry) {
        for (_, m) in &mols {
            match detect_clashes(m, &pocket, s.clash_overlap) {
                Ok(flags) => d.clash.add(m, &flags),
                Err(e) => {
                    d.warnings.push(format!("clash: {e}"));
                    d.incomplete.insert("geometry".into());
                    break;
                }
            }
        }
    }

    if s.aspects.contains(&Aspect::Interaction) {
        d.profiles.pocket_id = entry.pocket_id.clone();
        match PocketFeatures::new(&pocket) {
            Ok(features) => {
                d.profiles.generated = mols.iter().map(|(_, m)| profile_with(m, &features, &s.profiler)).collect();
                d.profiles.reference = vec![profile_with(&reference, &features, &s.profiler)];
            }
            Err(e) => {
                d.warnings.push(format!("interaction profile: {e}"));
                d.incomplete.insert("interaction".into());
            }
        }
        match &s.energy {
            None => {
                d.warnings.push("no docking program or scores file configured; affinity metrics absent".into());
                d.incomplete.insert("interaction".into());
            }
            Some(source) => {
                for &mode in &s.modes {
                    let mut pa = PocketAffinity {
                        pocket_id: entry.pocket_id.clone(),
                        ..Default::default()
                    };
                    let mut failed = 0usize;
                    match gate.with(|| source.energy(&entry.pocket_id, Ordinal::Reference, &reference, &entry.pocket, mode)) {
                        Ok(e) => pa.reference = e,
                        Err(e) => {
                            d.warnings.push(format!("{mode} reference: {e}"));
                            failed += 1;
                        }
                    }
                    for (ordinal, m) in &mols {
                        match gate.with(|| source.energy(&entry.pocket_id, Ordinal::Generated(*ordinal), m, &entry.pocket, mode)) {
                            Ok(Some(energy)) => pa.generated.push(AffinityRecord {
                                pocket_id: entry.pocket_id.clone(),
                                molecule_ordinal: *ordinal,
                                mode,
                                energy,
                                n_lig: m.heavy_atom_count(),
                            }),
                            Ok(None) => failed += 1,
                            Err(e) => {
                                d.warnings.push(format!("{mode} record {}: {e}", ordinal + 1));
                                failed += 1;
                            }
                        }
                    }
                    if failed > 0 {
                        d.warnings.push(format!("{mode}: {failed} energies unavailable"));
                        d.incomplete.insert("interaction".into());
                    }
                    d.affinity.insert(mode, pa);
                }
            }
        }
    }

    d.generated = mols.into_iter().map(|(_, m)| m).collect();
    d.reference = vec![reference];
    Ok(d)
}

fn pct(v: Option<f64>) -> Option<f64> {
    v.map(|x| x * 100.0)
}

/// Metrics over any set of pockets; one pocket gives its own report.
fn fill_report(report: &mut MetricReport, data: &[&PocketData], s: &EvalSettings) {
    let mut w = Vec::new();
    let records: usize = data.iter().map(|d| d.records).sum();
    let valid: usize = data.iter().map(|d| d.valid).sum();
    report.counts.insert("pockets".into(), data.len() as u64);
    report.counts.insert("generated_records".into(), records as u64);
    report.counts.insert("valid_molecules".into(), valid as u64);
    report.set("validity", "ratio", (records > 0).then(|| valid as f64 / records as f64));

    if s.aspects.contains(&Aspect::Substructure) {
        let counts: Vec<PocketCounts> = data.iter().map(|d| d.counts.clone()).collect();
        let opts = SubstructureOptions {
            convention: s.convention,
            mae_mode: s.mae_mode,
        };
        for (k, v) in substructure_metrics(&counts, default_library(), &opts, &mut w) {
            report.set("substructure", &k, v);
        }
    }

    if s.aspects.contains(&Aspect::Chemical) {
        let chem: Vec<ChemProfile> = data.iter().flat_map(|d| d.chem.iter().copied()).collect();
        for (k, v) in chem_metrics(&chem) {
            report.set("chemical", &k, v);
        }
    }

    if s.aspects.contains(&Aspect::Interaction) {
        let profiles: Vec<PocketProfiles> = data.iter().map(|d| d.profiles.clone()).collect();
        for (k, v) in interaction_distribution_metrics(&profiles, s.convention, &mut w) {
            report.set("interaction", &k, v);
        }
        // headline gap and efficiency come from full docking when it ran
        let headline = s.modes.iter().copied().find(|&m| m == AffinityMode::Dock).or(s.modes.last().copied());
        for &mode in &s.modes {
            let pockets: Vec<PocketAffinity> = data.iter().filter_map(|d| d.affinity.get(&mode).cloned()).collect();
            let a = affinity_metrics(&pockets, &mut w);
            let suffix = mode.metric_suffix();
            report.set("interaction", &format!("vina_{suffix}"), a.mean_energy);
            report.set("interaction", &format!("imp_{suffix}"), pct(a.imp));
            report.set("interaction", &format!("mpbg_{suffix}"), a.mpbg);
            report.set("interaction", &format!("lbe_{suffix}"), a.lbe);
            report.counts.insert(format!("invalid_energies_{suffix}"), a.invalid_records as u64);
            if Some(mode) == headline && s.energy.is_some() {
                report.set("interaction", "mpbg", a.mpbg);
                report.set("interaction", "lbe", a.lbe);
            }
        }
    }

    if s.aspects.contains(&Aspect::Geometry) {
        let gen: Vec<MoleculeGraph> = data.iter().flat_map(|d| d.generated.iter().cloned()).collect();
        let reference: Vec<MoleculeGraph> = data.iter().flat_map(|d| d.reference.iter().cloned()).collect();
        let g = geometry_jsd_metrics_with(&gen, &reference, s.convention, &s.bins, &mut w);
        report.set("geometry", "jsd_bl", g.jsd_bl);
        report.set("geometry", "jsd_ba", g.jsd_ba);
        for (k, v) in g.bond_length.iter().chain(&g.bond_angle) {
            report.set("geometry_detail", k, *v);
        }
        let mut clash = ClashReport::default();
        for d in data {
            clash.merge(&d.clash);
        }
        report.set("geometry", "ratio_cca", clash.ratio_cca());
        report.set("geometry", "ratio_cm", clash.ratio_cm());
    }

    let incomplete: BTreeSet<&String> = data.iter().flat_map(|d| &d.incomplete).collect();
    for a in incomplete {
        report.warnings.push(format!("aspect {a} incomplete"));
    }
    if data.len() == 1 {
        report.warnings.extend(data[0].warnings.iter().cloned());
    }
    // aggregate warnings name each distinct message once
    let mut seen = BTreeSet::new();
    for msg in w {
        if seen.insert(msg.clone()) {
            report.warnings.push(msg);
        }
    }
}

/// Runs every pocket on a pool of `jobs` threads. Results come back in
/// manifest order, so reports do not depend on the thread count.
pub fn run_eval(entries: &[ManifestEntry], s: &EvalSettings) -> Result<EvalOutcome> {
    let sidecar = match &s.properties {
        PropertyProvider::Sidecar(path) => Some(
            std::fs::read_to_string(path).with_context(|| format!("reading property file {}", path.display()))?,
        ),
        _ => None,
    };
    let gate = Gate::new(s.dock_jobs);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(s.jobs.max(1))
        .build()
        .context("starting worker pool")?;
    let results: Vec<Result<PocketData, String>> = pool.install(|| {
        entries
            .par_iter()
            .map(|e| evaluate_pocket(e, s, &gate, sidecar.as_deref()))
            .collect()
    });

    let mut aggregate = MetricReport::new(&s.method);
    let mut pockets = Vec::new();
    let mut ok: Vec<&PocketData> = Vec::new();
    for (entry, r) in entries.iter().zip(&results) {
        match r {
            Ok(d) => {
                let mut rep = MetricReport::new(&d.pocket_id);
                fill_report(&mut rep, &[d], s);
                pockets.push(rep);
                ok.push(d);
            }
            Err(e) => {
                log::warn!("pocket {}: {e}", entry.pocket_id);
                aggregate.errors.push(format!("pocket {}: {e}", entry.pocket_id));
            }
        }
    }
    if !ok.is_empty() {
        fill_report(&mut aggregate, &ok, s);
    }
    aggregate.counts.insert("failed_pockets".into(), (entries.len() - ok.len()) as u64);
    Ok(EvalOutcome {
        succeeded: ok.len(),
        pockets,
        aggregate,
    })
}

fn file_stem_for(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect()
}

fn write_both(report: &MetricReport, dir: &Path, stem: &str) -> Result<()> {
    for (fmt, ext) in [(ReportFormat::Json, "json"), (ReportFormat::Csv, "csv")] {
        let bytes = write_report(report, fmt)?;
        let path = dir.join(format!("{stem}.{ext}"));
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Writes `pockets/<id>.{json,csv}` and `aggregate.{json,csv}` under `out`.
/// Reports without any value are logged and skipped.
pub fn write_outcome(outcome: &EvalOutcome, out: &Path) -> Result<()> {
    let pocket_dir = out.join("pockets");
    std::fs::create_dir_all(&pocket_dir).with_context(|| format!("creating {}", pocket_dir.display()))?;
    for rep in &outcome.pockets {
        if let Err(e) = write_both(rep, &pocket_dir, &file_stem_for(&rep.label)) {
            log::warn!("{e}");
        }
    }
    if outcome.aggregate.is_complete() {
        write_both(&outcome.aggregate, out, "aggregate")?;
    } else {
        // nothing succeeded: still leave the errors behind
        let json = serde_json::to_string_pretty(&outcome.aggregate)?;
        std::fs::write(out.join("aggregate.json"), json)?;
    }
    Ok(())
}
