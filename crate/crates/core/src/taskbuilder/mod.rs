//! Task instances (context/target partitions of a ligand) and dataset
//! manifests built from them.

pub mod audit;
pub mod decompose;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::structio::{parse_sdf, MoleculeGraph};

pub use audit::audit_instance;
pub use decompose::{
    all_candidates, decompose, decompose_denovo, decompose_fragment_growing, decompose_linker, decompose_scaffold,
    decompose_sidechain, fragment_candidates, linker_candidates, Partition,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Denovo,
    Linker,
    Fragment,
    Sidechain,
    Scaffold,
}

impl TaskKind {
    pub const ALL: [TaskKind; 5] = [
        TaskKind::Denovo,
        TaskKind::Linker,
        TaskKind::Fragment,
        TaskKind::Sidechain,
        TaskKind::Scaffold,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Denovo => "denovo",
            TaskKind::Linker => "linker",
            TaskKind::Fragment => "fragment",
            TaskKind::Sidechain => "sidechain",
            TaskKind::Scaffold => "scaffold",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown task kind '{s}' (expected denovo, linker, fragment, sidechain, scaffold)"))
    }
}

/// Size rules for the cut-based tasks. Fragment sizes must be strictly
/// above `min_fragment_atoms`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskThresholds {
    pub min_fragment_atoms: usize,
    pub min_linker_path_atoms: usize,
    /// The grown part must be strictly larger than this fraction of the other.
    pub growing_size_ratio: f64,
}

impl Default for TaskThresholds {
    fn default() -> Self {
        TaskThresholds {
            min_fragment_atoms: 5,
            min_linker_path_atoms: 2,
            growing_size_ratio: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub kind: TaskKind,
    pub pocket_ref: String,
    pub ligand_ref: String,
    pub split: String,
    pub context_atoms: Vec<usize>,
    pub target_atoms: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cut_bonds: Vec<usize>,
}

/// One protein-ligand pair to decompose. `reference` is accepted for the
/// ligand so evaluation manifests can be reused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexEntry {
    #[serde(default)]
    pub pocket_id: Option<String>,
    pub pocket: PathBuf,
    #[serde(alias = "reference")]
    pub ligand: PathBuf,
    #[serde(default = "default_split")]
    pub split: String,
}

fn default_split() -> String {
    "test".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub kind: TaskKind,
    pub pocket_ref: String,
    pub ligand_ref: String,
    pub split: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TaskManifest {
    pub instances: Vec<TaskInstance>,
    pub skips: Vec<SkipRecord>,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Reads a complex list, one JSON object per line; relative paths are
/// resolved against the list's directory.
pub fn read_complex_list(path: &Path) -> Result<Vec<ComplexEntry>, ManifestError> {
    let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut e: ComplexEntry = serde_json::from_str(line).map_err(|source| ManifestError::Json { line: k + 1, source })?;
        e.pocket = base.join(&e.pocket);
        e.ligand = base.join(&e.ligand);
        out.push(e);
    }
    Ok(out)
}

pub fn load_ligand(path: &Path) -> Result<MoleculeGraph, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_sdf(&bytes)
        .into_iter()
        .next()
        .ok_or_else(|| format!("{}: no molecule", path.display()))?
        .map_err(|e| format!("{}: {e}", path.display()))
}

/// Decomposes one ligand; `Err` carries the skip reason.
pub fn build_instances(
    mol: &MoleculeGraph,
    kind: TaskKind,
    th: &TaskThresholds,
    all: bool,
) -> Result<Vec<Partition>, String> {
    if mol.components().len() != 1 {
        return Err("ligand is disconnected".into());
    }
    let parts = if all {
        all_candidates(mol, kind, th)
    } else {
        decompose(mol, kind, th).into_iter().collect()
    };
    if parts.is_empty() {
        return Err(format!("no valid {kind} decomposition"));
    }
    Ok(parts)
}

/// Applies `kind` to every complex. Unreadable ligands and molecules
/// without a decomposition become skip records; input order is kept.
pub fn build_task_dataset(complexes: &[ComplexEntry], kind: TaskKind, th: &TaskThresholds, all: bool) -> TaskManifest {
    let mut manifest = TaskManifest::default();
    for c in complexes {
        let pocket_ref = c.pocket.to_string_lossy().into_owned();
        let ligand_ref = c.ligand.to_string_lossy().into_owned();
        let result = load_ligand(&c.ligand).and_then(|mol| build_instances(&mol, kind, th, all));
        match result {
            Ok(parts) => manifest.instances.extend(parts.into_iter().map(|p| TaskInstance {
                kind,
                pocket_ref: pocket_ref.clone(),
                ligand_ref: ligand_ref.clone(),
                split: c.split.clone(),
                context_atoms: p.context_atoms,
                target_atoms: p.target_atoms,
                cut_bonds: p.cut_bonds,
            })),
            Err(reason) => manifest.skips.push(SkipRecord {
                kind,
                pocket_ref,
                ligand_ref,
                split: c.split.clone(),
                reason,
            }),
        }
    }
    manifest
}

fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), ManifestError> {
    let io = |source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    for r in rows {
        let line = serde_json::to_string(r).expect("plain data serializes");
        writeln!(f, "{line}").map_err(io)?;
    }
    f.flush().map_err(io)
}

impl TaskManifest {
    /// Writes `<stem>.jsonl` and the skips to `<stem>.skips.jsonl`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf), ManifestError> {
        let main = dir.join(format!("{stem}.jsonl"));
        let skips = dir.join(format!("{stem}.skips.jsonl"));
        write_jsonl(&main, &self.instances)?;
        write_jsonl(&skips, &self.skips)?;
        Ok((main, skips))
    }
}

#[cfg(test)]
mod tests {
    use super::decompose::fixtures::*;
    use super::*;
    use crate::structio::write_sdf;

    #[test]
    fn kinds_parse() {
        for k in TaskKind::ALL {
            assert_eq!(k.as_str().parse::<TaskKind>().unwrap(), k);
        }
        assert!("hop".parse::<TaskKind>().is_err());
    }

    #[test]
    fn dataset_counts_and_skips() {
        let dir = tempfile::tempdir().unwrap();
        let mut list = String::new();
        for (k, mol) in [bibenzyl(), toluene(), bibenzyl()].iter().enumerate() {
            let name = format!("lig{k}.sdf");
            std::fs::write(dir.path().join(&name), write_sdf(std::slice::from_ref(mol))).unwrap();
            list.push_str(&format!("{{\"pocket\": \"p{k}.pdb\", \"reference\": \"{name}\", \"split\": \"test\"}}\n"));
        }
        list.push_str("{\"pocket\": \"p9.pdb\", \"ligand\": \"missing.sdf\"}\n");
        let path = dir.path().join("complexes.jsonl");
        std::fs::write(&path, list).unwrap();
        let complexes = read_complex_list(&path).unwrap();
        let th = TaskThresholds::default();
        let m = build_task_dataset(&complexes, TaskKind::Linker, &th, false);
        assert_eq!(m.instances.len(), 2);
        assert_eq!(m.skips.len(), 2);
        assert!(m.skips[1].reason.contains("missing.sdf"));
        let sc = build_task_dataset(&complexes, TaskKind::Sidechain, &th, false);
        let sf = build_task_dataset(&complexes, TaskKind::Scaffold, &th, false);
        assert_eq!(sc.instances.len(), sf.instances.len());
        let (main, skips) = m.write(dir.path(), "linker").unwrap();
        assert_eq!(std::fs::read_to_string(main).unwrap().lines().count(), 2);
        assert_eq!(std::fs::read_to_string(skips).unwrap().lines().count(), 2);
    }

    #[test]
    fn emitted_instances_pass_audit() {
        let th = TaskThresholds::default();
        for mol in [bibenzyl(), toluene(), chain(13), chain(12)] {
            for kind in TaskKind::ALL {
                for p in all_candidates(&mol, kind, &th) {
                    let inst = TaskInstance {
                        kind,
                        pocket_ref: String::new(),
                        ligand_ref: String::new(),
                        split: "test".into(),
                        context_atoms: p.context_atoms,
                        target_atoms: p.target_atoms,
                        cut_bonds: p.cut_bonds,
                    };
                    assert_eq!(audit_instance(&mol, &inst, &th), Ok(()), "{kind}");
                }
            }
        }
    }

    #[test]
    fn audit_catches_bad_instances() {
        let th = TaskThresholds::default();
        let inst = TaskInstance {
            kind: TaskKind::Fragment,
            pocket_ref: String::new(),
            ligand_ref: String::new(),
            split: "test".into(),
            context_atoms: (5..12).collect(),
            target_atoms: (0..5).collect(),
            cut_bonds: vec![],
        };
        assert!(audit_instance(&chain(12), &inst, &th).is_err());
        let overlap = TaskInstance {
            context_atoms: (0..12).collect(),
            target_atoms: vec![0],
            ..inst
        };
        assert!(audit_instance(&chain(12), &overlap, &th).is_err());
    }
}
