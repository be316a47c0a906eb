//! Docking energies, either read from a precomputed scores table or
//! obtained by running an external docking program per molecule.
//!
//! Scores CSV (header required):
//!
//! ```text
//! pocket_id,ordinal,mode,energy
//! 1abc,0,dock,-7.70
//! 1abc,ref,dock,-7.10
//! ```
//!
//! The ordinal `ref` marks the pocket's reference ligand.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use thiserror::Error;

use super::affinity::{AffinityMode, AffinityRecord};
use crate::external::{run_captured, ExternalError};
use crate::structio::{write_sdf, MoleculeGraph};

pub const DOCKING_PROGRAM_ENV: &str = "POCKETBENCH_VINA";

#[derive(Debug, Error)]
pub enum DockError {
    #[error("scores file line {line}: {reason}")]
    ScoresFormat { line: usize, reason: String },
    #[error("reading {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("no docking program configured and no scores file given")]
    NotConfigured,
    #[error(transparent)]
    Program(#[from] ExternalError),
    #[error("no energy found in docking output:\n{output}")]
    Parse { output: String },
    #[error("writing ligand file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ordinal {
    Reference,
    Generated(usize),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreTable {
    entries: HashMap<(String, Ordinal, AffinityMode), f64>,
}

impl ScoreTable {
    pub fn get(&self, pocket: &str, ordinal: Ordinal, mode: AffinityMode) -> Option<f64> {
        self.entries.get(&(pocket.to_string(), ordinal, mode)).copied()
    }

    pub fn insert(&mut self, pocket: &str, ordinal: Ordinal, mode: AffinityMode, energy: f64) {
        self.entries.insert((pocket.to_string(), ordinal, mode), energy);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn from_path(path: &Path) -> Result<ScoreTable, DockError> {
        let text = std::fs::read_to_string(path).map_err(|source| DockError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        parse_scores_csv(&text)
    }
}

pub fn parse_scores_csv(text: &str) -> Result<ScoreTable, DockError> {
    let bad = |line: usize, reason: String| DockError::ScoresFormat { line, reason };
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = rows.next().ok_or_else(|| bad(1, "empty file".into()))?;
    let cols: Vec<String> = header.split(',').map(|c| c.trim().to_ascii_lowercase()).collect();
    if cols != ["pocket_id", "ordinal", "mode", "energy"] {
        return Err(bad(hline, format!("expected header pocket_id,ordinal,mode,energy, found '{header}'")));
    }
    let mut table = ScoreTable::default();
    for (line, row) in rows {
        let cells: Vec<&str> = row.split(',').map(str::trim).collect();
        if cells.len() != 4 {
            return Err(bad(line, format!("expected 4 fields, found {}", cells.len())));
        }
        let ordinal = if cells[1].eq_ignore_ascii_case("ref") {
            Ordinal::Reference
        } else {
            Ordinal::Generated(cells[1].parse().map_err(|_| bad(line, format!("bad ordinal '{}'", cells[1])))?)
        };
        let mode: AffinityMode = cells[2].parse().map_err(|e| bad(line, e))?;
        let energy: f64 = cells[3]
            .parse()
            .ok()
            .filter(|e: &f64| e.is_finite())
            .ok_or_else(|| bad(line, format!("bad energy '{}'", cells[3])))?;
        table.insert(cells[0], ordinal, mode, energy);
    }
    Ok(table)
}

/// External docking program. Each template argument may contain
/// `{receptor}`, `{ligand}` and `{mode}`; the ligand is written to a
/// temporary SDF file.
#[derive(Debug, Clone, PartialEq)]
pub struct DockCommand {
    pub template: Vec<String>,
    pub timeout: Duration,
}

impl DockCommand {
    /// Template from a whitespace-separated string.
    pub fn parse(template: &str, timeout: Duration) -> DockCommand {
        DockCommand {
            template: template.split_whitespace().map(String::from).collect(),
            timeout,
        }
    }

    pub fn from_env(timeout: Duration) -> Option<DockCommand> {
        std::env::var(DOCKING_PROGRAM_ENV)
            .ok()
            .filter(|s| !s.trim().is_empty())
            .map(|s| DockCommand::parse(&s, timeout))
    }

    pub fn argv(&self, receptor: &Path, ligand: &Path, mode: AffinityMode) -> Vec<String> {
        self.template
            .iter()
            .map(|a| {
                a.replace("{receptor}", &receptor.to_string_lossy())
                    .replace("{ligand}", &ligand.to_string_lossy())
                    .replace("{mode}", mode.as_str())
            })
            .collect()
    }

    pub fn run(&self, mol: &MoleculeGraph, receptor: &Path, mode: AffinityMode) -> Result<f64, DockError> {
        let mut file = tempfile::Builder::new().suffix(".sdf").tempfile()?;
        file.write_all(write_sdf(std::slice::from_ref(mol)).as_bytes())?;
        file.flush()?;
        let out = run_captured(&self.argv(receptor, file.path(), mode), None, self.timeout)?;
        parse_docking_output(&out.stdout).ok_or(DockError::Parse { output: out.stdout })
    }
}

fn first_float(s: &str) -> Option<f64> {
    s.split_whitespace().find_map(|t| t.parse::<f64>().ok())
}

/// Energy from docking program output: the score-only and local
/// optimization summary lines, the first row of the pose table, or a
/// bare number.
pub fn parse_docking_output(text: &str) -> Option<f64> {
    for key in ["Estimated Free Energy of Binding", "Affinity:"] {
        if let Some(line) = text.lines().find(|l| l.contains(key)) {
            let tail = &line[line.find(key).unwrap() + key.len()..];
            if let Some(v) = first_float(tail.trim_start_matches([':', ' '])) {
                return Some(v);
            }
        }
    }
    let mut lines = text.lines();
    if lines.by_ref().any(|l| l.trim_start().starts_with("-----+")) {
        let row = lines.next()?;
        let mut it = row.split_whitespace();
        it.next()?;
        return it.next()?.parse().ok();
    }
    let trimmed = text.trim();
    trimmed.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Where energies come from for one evaluation run.
#[derive(Debug, Clone)]
pub enum EnergySource {
    Precomputed(ScoreTable),
    Program(DockCommand),
}

impl EnergySource {
    /// Energy for one molecule; `Ok(None)` when a precomputed table has no row.
    pub fn energy(
        &self,
        pocket_id: &str,
        ordinal: Ordinal,
        mol: &MoleculeGraph,
        receptor: &Path,
        mode: AffinityMode,
    ) -> Result<Option<f64>, DockError> {
        match self {
            EnergySource::Precomputed(t) => Ok(t.get(pocket_id, ordinal, mode)),
            EnergySource::Program(cmd) => cmd.run(mol, receptor, mode).map(Some),
        }
    }

    pub fn record(
        &self,
        pocket_id: &str,
        ordinal: usize,
        mol: &MoleculeGraph,
        receptor: &Path,
        mode: AffinityMode,
    ) -> Result<Option<AffinityRecord>, DockError> {
        Ok(self
            .energy(pocket_id, Ordinal::Generated(ordinal), mol, receptor, mode)?
            .map(|energy| AffinityRecord {
                pocket_id: pocket_id.to_string(),
                molecule_ordinal: ordinal,
                mode,
                energy,
                n_lig: mol.heavy_atom_count(),
            }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precomputed_row() {
        let t = parse_scores_csv("pocket_id,ordinal,mode,energy\n1abc,0,dock,-7.70\n1abc,ref,dock,-7.1\n").unwrap();
        assert_eq!(t.get("1abc", Ordinal::Generated(0), AffinityMode::Dock), Some(-7.70));
        assert_eq!(t.get("1abc", Ordinal::Reference, AffinityMode::Dock), Some(-7.1));
        assert_eq!(t.get("1abc", Ordinal::Generated(1), AffinityMode::Dock), None);
        assert_eq!(t.get("1abc", Ordinal::Generated(0), AffinityMode::Score), None);
    }

    #[test]
    fn header_required() {
        assert!(matches!(
            parse_scores_csv("1abc,0,dock,-7.70\n"),
            Err(DockError::ScoresFormat { line: 1, .. })
        ));
    }

    #[test]
    fn bad_energy_reports_line() {
        let err = parse_scores_csv("pocket_id,ordinal,mode,energy\n1abc,0,dock,x\n").unwrap_err();
        assert!(matches!(err, DockError::ScoresFormat { line: 2, .. }));
    }

    #[test]
    fn output_formats() {
        assert_eq!(
            parse_docking_output("Estimated Free Energy of Binding   : -6.470 (kcal/mol) [=(1)+(2)]"),
            Some(-6.47)
        );
        assert_eq!(parse_docking_output("Affinity: -7.139 (kcal/mol)\n"), Some(-7.139));
        let table = "mode |   affinity | dist from best mode\n     | (kcal/mol) | rmsd l.b.| rmsd u.b.\n-----+------------+----------+----------\n   1       -7.702          0          0\n   2       -7.1      1.2      2.0\n";
        assert_eq!(parse_docking_output(table), Some(-7.702));
        assert_eq!(parse_docking_output("-5.5\n"), Some(-5.5));
        assert_eq!(parse_docking_output("error: receptor missing"), None);
    }

    #[test]
    fn template_substitution() {
        let cmd = DockCommand::parse("vina --receptor {receptor} --ligand {ligand} --mode={mode}", Duration::from_secs(1));
        let argv = cmd.argv(Path::new("r.pdbqt"), Path::new("l.sdf"), AffinityMode::Minimize);
        assert_eq!(argv, ["vina", "--receptor", "r.pdbqt", "--ligand", "l.sdf", "--mode=minimize"]);
    }

    #[cfg(unix)]
    #[test]
    fn program_missing_is_an_error() {
        let cmd = DockCommand::parse("/nonexistent/dock {ligand}", Duration::from_secs(2));
        let mol = MoleculeGraph::point_cloud("m", vec![crate::structio::AtomRecord::new(crate::elements::Element::C, [0.0; 3])]).unwrap();
        assert!(matches!(
            cmd.run(&mol, Path::new("r.pdb"), AffinityMode::Dock),
            Err(DockError::Program(_))
        ));
    }

    #[cfg(unix)]
    #[test]
    fn program_output_parsed() {
        let cmd = DockCommand {
            template: vec!["sh".into(), "-c".into(), "echo 'Affinity: -4.25 (kcal/mol)'".into()],
            timeout: Duration::from_secs(5),
        };
        let mol = MoleculeGraph::point_cloud("m", vec![crate::structio::AtomRecord::new(crate::elements::Element::C, [0.0; 3])]).unwrap();
        assert_eq!(cmd.run(&mol, Path::new("r.pdb"), AffinityMode::Minimize).unwrap(), -4.25);
    }
}
