//! The `build-tasks`, `rank` and `report` commands.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use pocketbench_core::ranking::{parse_matrix_csv, rank_methods, RankOptions, RankTable, METRICS};
use pocketbench_core::structio::MetricReport;
use pocketbench_core::taskbuilder::{build_task_dataset, read_complex_list, TaskKind, TaskThresholds};

/// One manifest per kind, written as `<out>/<kind>.jsonl` plus skips.
/// Returns (kind, instance count, skip count) per kind.
pub fn build_tasks(
    complexes: &Path,
    kinds: &[TaskKind],
    th: &TaskThresholds,
    all_candidates: bool,
    out: &Path,
) -> Result<Vec<(TaskKind, usize, usize)>> {
    let list = read_complex_list(complexes)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut summary = Vec::new();
    for &kind in kinds {
        let manifest = build_task_dataset(&list, kind, th, all_candidates);
        manifest.write(out, kind.as_str())?;
        summary.push((kind, manifest.instances.len(), manifest.skips.len()));
    }
    Ok(summary)
}

/// Ranks a metric matrix and writes `rank_table.json` and `leaderboard.csv`.
pub fn rank(matrix: &Path, opts: &RankOptions, out: &Path) -> Result<RankTable> {
    let text = std::fs::read_to_string(matrix).with_context(|| format!("reading {}", matrix.display()))?;
    let parsed = parse_matrix_csv(&text).with_context(|| format!("parsing {}", matrix.display()))?;
    let table = rank_methods(&parsed, opts)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    std::fs::write(out.join("rank_table.json"), serde_json::to_string_pretty(&table)? + "\n")?;
    std::fs::write(out.join("leaderboard.csv"), table.leaderboard_csv())?;
    Ok(table)
}

/// Weights given as `aspect=value,...`; unnamed aspects keep their weight.
pub fn parse_weights(spec: &str, base: &mut RankOptions) -> Result<()> {
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let Some((name, value)) = part.split_once('=') else {
            bail!("weight '{part}' is not aspect=value");
        };
        let aspect = name.parse().map_err(anyhow::Error::msg)?;
        let w: f64 = value.trim().parse().with_context(|| format!("weight '{part}'"))?;
        if !w.is_finite() || w < 0.0 {
            bail!("weight '{part}' must be a non-negative number");
        }
        base.weights.insert(aspect, w);
    }
    Ok(())
}

/// Combines aggregate reports into a method x metric matrix CSV, one row per
/// report (labelled by the report's method), columns in ranking order.
pub fn matrix_from_reports(paths: &[PathBuf]) -> Result<String> {
    if paths.is_empty() {
        bail!("no reports given");
    }
    let mut rows: BTreeMap<String, Vec<Option<f64>>> = BTreeMap::new();
    let mut order = Vec::new();
    for p in paths {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let rep: MetricReport = serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
        let values = METRICS
            .iter()
            .map(|m| rep.get(m.aspect.as_str(), m.id))
            .collect();
        if rows.insert(rep.label.clone(), values).is_some() {
            bail!("method '{}' appears in more than one report", rep.label);
        }
        order.push(rep.label);
    }
    let mut out = String::from("method");
    for m in &METRICS {
        out.push(',');
        out.push_str(m.id);
    }
    out.push('\n');
    for method in order {
        out.push_str(&method.replace(',', "_"));
        for v in &rows[&method] {
            out.push(',');
            match v {
                Some(x) => out.push_str(&format!("{x}")),
                None => out.push('-'),
            }
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pocketbench_core::ranking::Aspect;

    #[test]
    fn weights_override() {
        let mut o = RankOptions::default();
        parse_weights("interaction=1, geometry=0", &mut o).unwrap();
        assert_eq!(o.weights[&Aspect::Interaction], 1.0);
        assert_eq!(o.weights[&Aspect::Geometry], 0.0);
        assert_eq!(o.weights[&Aspect::Chemical], 0.2);
        assert!(parse_weights("speed=1", &mut o).is_err());
        assert!(parse_weights("geometry", &mut o).is_err());
    }

    #[test]
    fn reports_become_matrix_rows() {
        let dir = tempfile::tempdir().unwrap();
        let mut paths = Vec::new();
        for (name, qed) in [("a", 0.5), ("b", 0.6)] {
            let mut r = MetricReport::new(name);
            r.set("chemical", "qed", Some(qed));
            let p = dir.path().join(format!("{name}.json"));
            std::fs::write(&p, serde_json::to_string(&r).unwrap()).unwrap();
            paths.push(p);
        }
        let csv = matrix_from_reports(&paths).unwrap();
        let m = parse_matrix_csv(&csv).unwrap();
        assert_eq!(m.methods, vec!["a", "b"]);
        let col = m.metrics.iter().position(|x| x == "qed").unwrap();
        assert_eq!(m.values[1][col], Some(0.6));
        assert_eq!(m.values[0][0], None);
    }
}
