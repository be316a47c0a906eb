//! Per-metric ranking of methods, aspect scores and the weighted
//! leaderboard.
//!
//! Every metric ranks methods 1..N; absent or invalid values take the
//! worst rank N. An aspect score is `weight * (N - mean rank)` over the
//! aspect's metrics, and methods are ordered by the sum of their aspect
//! scores.

pub mod matrix;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::chem::LOGP_RANGE;

pub use matrix::{parse_matrix_csv, MetricMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aspect {
    Substructure,
    Chemical,
    Interaction,
    Geometry,
}

impl Aspect {
    pub const ALL: [Aspect; 4] = [Aspect::Substructure, Aspect::Chemical, Aspect::Interaction, Aspect::Geometry];

    pub fn as_str(self) -> &'static str {
        match self {
            Aspect::Substructure => "substructure",
            Aspect::Chemical => "chemical",
            Aspect::Interaction => "interaction",
            Aspect::Geometry => "geometry",
        }
    }
}

impl fmt::Display for Aspect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Aspect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Aspect::ALL
            .into_iter()
            .find(|a| a.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown aspect '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LowerBetter,
    HigherBetter,
    /// Values inside the closed interval beat values outside it.
    InRange { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSpec {
    pub id: &'static str,
    pub aspect: Aspect,
    pub direction: Direction,
    /// Positive values are treated as absent (failed docking energies).
    pub positive_is_invalid: bool,
}

const fn spec(id: &'static str, aspect: Aspect, direction: Direction) -> MetricSpec {
    MetricSpec {
        id,
        aspect,
        direction,
        positive_is_invalid: false,
    }
}

const fn energy(id: &'static str) -> MetricSpec {
    MetricSpec {
        id,
        aspect: Aspect::Interaction,
        direction: Direction::LowerBetter,
        positive_is_invalid: true,
    }
}

use Aspect::{Chemical, Geometry, Interaction, Substructure};
use Direction::{HigherBetter, LowerBetter};

pub const METRICS: [MetricSpec; 26] = [
    spec("jsd_at", Substructure, LowerBetter),
    spec("mae_at", Substructure, LowerBetter),
    spec("jsd_rt", Substructure, LowerBetter),
    spec("mae_rt", Substructure, LowerBetter),
    spec("jsd_fg", Substructure, LowerBetter),
    spec("mae_fg", Substructure, LowerBetter),
    spec("qed", Chemical, HigherBetter),
    spec(
        "logp",
        Chemical,
        Direction::InRange {
            lo: LOGP_RANGE.0,
            hi: LOGP_RANGE.1,
        },
    ),
    spec("sa", Chemical, HigherBetter),
    spec("lpsk", Chemical, HigherBetter),
    energy("vina_score"),
    spec("imp_score", Interaction, HigherBetter),
    energy("vina_min"),
    spec("imp_min", Interaction, HigherBetter),
    energy("vina_dock"),
    spec("imp_dock", Interaction, HigherBetter),
    spec("mpbg", Interaction, HigherBetter),
    spec("lbe", Interaction, HigherBetter),
    spec("jsd_oa", Interaction, LowerBetter),
    spec("mae_oa", Interaction, LowerBetter),
    spec("jsd_pp", Interaction, LowerBetter),
    spec("mae_pp", Interaction, LowerBetter),
    spec("jsd_bl", Geometry, LowerBetter),
    spec("jsd_ba", Geometry, LowerBetter),
    spec("ratio_cca", Geometry, LowerBetter),
    spec("ratio_cm", Geometry, LowerBetter),
];

pub fn metric_spec(id: &str) -> Option<&'static MetricSpec> {
    METRICS.iter().find(|m| m.id == id)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieMethod {
    /// Tied values share the mean of their positions.
    #[default]
    Average,
    /// Tied values share the best position (1, 2, 2, 4).
    Min,
    /// Distinct values get consecutive ranks (1, 2, 2, 3).
    Dense,
}

impl FromStr for TieMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "average" => Ok(TieMethod::Average),
            "min" => Ok(TieMethod::Min),
            "dense" => Ok(TieMethod::Dense),
            other => Err(format!("unknown tie method '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RankOptions {
    pub ties: TieMethod,
    /// Per-aspect overrides of `ties`.
    pub aspect_ties: BTreeMap<Aspect, TieMethod>,
    /// When false, in-range values rank 1 and out-of-range values 2; when
    /// true both groups share averaged positions.
    pub range_tie_averaged: bool,
    pub weights: BTreeMap<Aspect, f64>,
    /// Rank given to absent values and used in `N - mean rank`; defaults to
    /// the number of methods.
    pub n_methods: Option<usize>,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            ties: TieMethod::Average,
            aspect_ties: BTreeMap::new(),
            range_tie_averaged: false,
            weights: BTreeMap::from([(Substructure, 0.2), (Chemical, 0.2), (Interaction, 0.4), (Geometry, 0.2)]),
            n_methods: None,
        }
    }
}

impl RankOptions {
    /// Tie handling that reproduces the published per-aspect mean ranks:
    /// dense for chemical properties, competition ranking for interaction.
    pub fn published() -> RankOptions {
        RankOptions {
            aspect_ties: BTreeMap::from([(Chemical, TieMethod::Dense), (Interaction, TieMethod::Min)]),
            ..RankOptions::default()
        }
    }

    pub fn profile(name: &str) -> Result<RankOptions, String> {
        match name {
            "default" => Ok(RankOptions::default()),
            "published" => Ok(RankOptions::published()),
            other => Err(format!("unknown ranking profile '{other}' (expected default or published)")),
        }
    }

    pub fn ties_for(&self, aspect: Aspect) -> TieMethod {
        self.aspect_ties.get(&aspect).copied().unwrap_or(self.ties)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RankError {
    #[error("line {line}: {reason}")]
    Matrix { line: usize, reason: String },
    #[error("need at least two methods, found {0}")]
    TooFewMethods(usize),
}

/// Ranks `values` for one metric. `None` when no value is usable.
pub fn rank_metric(
    values: &[Option<f64>],
    spec: &MetricSpec,
    ties: TieMethod,
    range_tie_averaged: bool,
    n_methods: usize,
) -> Option<Vec<f64>> {
    let usable: Vec<Option<f64>> = values
        .iter()
        .map(|v| v.filter(|x| x.is_finite() && !(spec.positive_is_invalid && *x > 0.0)))
        .collect();
    if usable.iter().all(Option::is_none) {
        return None;
    }
    let worst = n_methods as f64;
    let key: Vec<Option<f64>> = match spec.direction {
        Direction::LowerBetter => usable,
        Direction::HigherBetter => usable.iter().map(|v| v.map(|x| -x)).collect(),
        Direction::InRange { lo, hi } => {
            let inside: Vec<Option<f64>> = usable
                .iter()
                .map(|v| v.map(|x| if (lo..=hi).contains(&x) { 0.0 } else { 1.0 }))
                .collect();
            if !range_tie_averaged {
                return Some(inside.iter().map(|v| v.map_or(worst, |k| k + 1.0)).collect());
            }
            return Some(rank_keys(&inside, TieMethod::Average, worst));
        }
    };
    Some(rank_keys(&key, ties, worst))
}

/// Ascending ranks of present keys; absent keys get `worst`.
fn rank_keys(keys: &[Option<f64>], ties: TieMethod, worst: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..keys.len()).filter(|&i| keys[i].is_some()).collect();
    order.sort_by(|&a, &b| keys[a].partial_cmp(&keys[b]).expect("finite keys"));
    let mut ranks = vec![worst; keys.len()];
    let mut start = 0;
    let mut level = 0.0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && keys[order[end]] == keys[order[start]] {
            end += 1;
        }
        level += 1.0;
        let r = match ties {
            TieMethod::Average => (start + 1 + end) as f64 / 2.0,
            TieMethod::Min => (start + 1) as f64,
            TieMethod::Dense => level,
        };
        for &i in &order[start..end] {
            ranks[i] = r;
        }
        start = end;
    }
    ranks
}

pub fn aspect_score(mean_rank: f64, weight: f64, n_methods: usize) -> f64 {
    weight * (n_methods as f64 - mean_rank)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardRow {
    pub method: String,
    pub scores: BTreeMap<Aspect, f64>,
    pub total: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub n_methods: usize,
    /// metric -> method -> rank
    pub per_metric_ranks: BTreeMap<String, BTreeMap<String, f64>>,
    /// aspect -> method -> mean rank
    pub mean_ranks: BTreeMap<Aspect, BTreeMap<String, f64>>,
    /// method -> aspect -> score
    pub aspect_scores: BTreeMap<String, BTreeMap<Aspect, f64>>,
    pub final_order: Vec<LeaderboardRow>,
    pub skipped_metrics: Vec<String>,
    pub warnings: Vec<String>,
}

const TOTAL_EPS: f64 = 1e-9;

/// Orders by descending total; equal totals share the better rank.
pub fn overall_ranking(scores: &BTreeMap<String, BTreeMap<Aspect, f64>>) -> Vec<LeaderboardRow> {
    let mut rows: Vec<LeaderboardRow> = scores
        .iter()
        .map(|(m, s)| LeaderboardRow {
            method: m.clone(),
            scores: s.clone(),
            total: s.values().sum(),
            rank: 0,
        })
        .collect();
    rows.sort_by(|a, b| b.total.partial_cmp(&a.total).expect("finite totals").then(a.method.cmp(&b.method)));
    for i in 0..rows.len() {
        rows[i].rank = if i > 0 && (rows[i - 1].total - rows[i].total).abs() <= TOTAL_EPS {
            rows[i - 1].rank
        } else {
            i + 1
        };
    }
    rows
}

pub fn rank_methods(matrix: &MetricMatrix, opts: &RankOptions) -> Result<RankTable, RankError> {
    let n_rows = matrix.methods.len();
    if n_rows < 2 {
        return Err(RankError::TooFewMethods(n_rows));
    }
    let n = opts.n_methods.unwrap_or(n_rows);
    let mut warnings = Vec::new();
    let mut skipped = Vec::new();
    let mut per_metric: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    let mut by_aspect: BTreeMap<Aspect, Vec<Vec<f64>>> = BTreeMap::new();
    // methods with at least one usable value per aspect
    let mut present: BTreeMap<Aspect, Vec<bool>> = BTreeMap::new();

    for (col, id) in matrix.metrics.iter().enumerate() {
        let spec = metric_spec(id).expect("matrix metrics are validated on parse");
        let values: Vec<Option<f64>> = matrix.values.iter().map(|row| row[col]).collect();
        let Some(ranks) = rank_metric(&values, spec, opts.ties_for(spec.aspect), opts.range_tie_averaged, n) else {
            warnings.push(format!("metric {id}: no usable values, column skipped"));
            skipped.push(id.clone());
            continue;
        };
        let seen = present.entry(spec.aspect).or_insert_with(|| vec![false; n_rows]);
        for (i, v) in values.iter().enumerate() {
            if v.is_some_and(|x| x.is_finite() && !(spec.positive_is_invalid && x > 0.0)) {
                seen[i] = true;
            }
        }
        per_metric.insert(id.clone(), matrix.methods.iter().cloned().zip(ranks.iter().copied()).collect());
        by_aspect.entry(spec.aspect).or_default().push(ranks);
    }

    let mut mean_ranks: BTreeMap<Aspect, BTreeMap<String, f64>> = BTreeMap::new();
    let mut scores: BTreeMap<String, BTreeMap<Aspect, f64>> = BTreeMap::new();
    for aspect in Aspect::ALL {
        let Some(cols) = by_aspect.get(&aspect) else {
            warnings.push(format!("aspect {aspect}: no ranked metrics, left out of totals"));
            continue;
        };
        let weight = opts.weights.get(&aspect).copied().unwrap_or(0.0);
        for (i, method) in matrix.methods.iter().enumerate() {
            let mean = cols.iter().map(|c| c[i]).sum::<f64>() / cols.len() as f64;
            mean_ranks.entry(aspect).or_default().insert(method.clone(), mean);
            scores
                .entry(method.clone())
                .or_default()
                .insert(aspect, aspect_score(mean, weight, n));
        }
    }
    let aspects_present: Vec<Aspect> = by_aspect.keys().copied().collect();
    let eligible: BTreeMap<String, BTreeMap<Aspect, f64>> = scores
        .iter()
        .enumerate()
        .filter(|(_, (method, _))| {
            let i = matrix.methods.iter().position(|m| m == *method).expect("known method");
            let missing: Vec<&Aspect> = aspects_present.iter().filter(|a| !present[a][i]).collect();
            if !missing.is_empty() {
                warnings.push(format!("method {method}: no values for {missing:?}, excluded from the final order"));
            }
            missing.is_empty()
        })
        .map(|(_, (m, s))| (m.clone(), s.clone()))
        .collect();

    Ok(RankTable {
        n_methods: n,
        per_metric_ranks: per_metric,
        mean_ranks,
        aspect_scores: scores,
        final_order: overall_ranking(&eligible),
        skipped_metrics: skipped,
        warnings,
    })
}

impl RankTable {
    /// `method,substructure,chemical,interaction,geometry,total,rank` at two
    /// decimals, in final order. Aspects without metrics are left empty.
    pub fn leaderboard_csv(&self) -> String {
        let mut out = String::from("method,substructure,chemical,interaction,geometry,total,rank\n");
        for row in &self.final_order {
            out.push_str(&row.method);
            for a in Aspect::ALL {
                out.push(',');
                if let Some(s) = row.scores.get(&a) {
                    out.push_str(&format!("{s:.2}"));
                }
            }
            out.push_str(&format!(",{:.2},{}\n", row.total, row.rank));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lower() -> &'static MetricSpec {
        metric_spec("jsd_at").unwrap()
    }

    #[test]
    fn absent_gets_worst() {
        let r = rank_metric(&[Some(0.1), Some(0.2), None], lower(), TieMethod::Average, false, 3).unwrap();
        assert_eq!(r, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn ties_averaged() {
        let r = rank_metric(&[Some(0.5), Some(0.5), Some(0.7)], lower(), TieMethod::Average, false, 3).unwrap();
        assert_eq!(r, vec![1.5, 1.5, 3.0]);
    }

    #[test]
    fn tie_methods() {
        let v = [Some(1.0), Some(2.0), Some(2.0), Some(3.0)];
        assert_eq!(rank_metric(&v, lower(), TieMethod::Min, false, 4).unwrap(), vec![1.0, 2.0, 2.0, 4.0]);
        assert_eq!(rank_metric(&v, lower(), TieMethod::Dense, false, 4).unwrap(), vec![1.0, 2.0, 2.0, 3.0]);
    }

    #[test]
    fn positive_energy_is_absent() {
        let vina = metric_spec("vina_dock").unwrap();
        let r = rank_metric(&[Some(-7.0), Some(1.2), Some(-8.0)], vina, TieMethod::Average, false, 3).unwrap();
        assert_eq!(r, vec![2.0, 3.0, 1.0]);
    }

    #[test]
    fn logp_range_rule() {
        let logp = metric_spec("logp").unwrap();
        let v = [Some(0.56), Some(5.27), Some(6.0), None];
        assert_eq!(rank_metric(&v, logp, TieMethod::Average, false, 4).unwrap(), vec![1.0, 1.0, 2.0, 4.0]);
        assert_eq!(rank_metric(&v, logp, TieMethod::Average, true, 4).unwrap(), vec![1.5, 1.5, 3.0, 4.0]);
    }

    #[test]
    fn all_absent_is_skipped() {
        assert!(rank_metric(&[None, None], lower(), TieMethod::Average, false, 2).is_none());
    }

    #[test]
    fn score_arithmetic() {
        assert!((aspect_score(6.33, 0.2, 12) - 1.134).abs() < 1e-9);
        assert!((aspect_score(2.91, 0.4, 12) - 3.636).abs() < 1e-9);
    }

    #[test]
    fn identical_totals_share_rank_one() {
        let s: BTreeMap<String, BTreeMap<Aspect, f64>> = ["a", "b", "c"]
            .iter()
            .map(|m| (m.to_string(), BTreeMap::from([(Substructure, 1.0)])))
            .collect();
        assert!(overall_ranking(&s).iter().all(|r| r.rank == 1));
    }

    #[test]
    fn single_metric_matrix_orders_by_it() {
        let m = parse_matrix_csv("method,qed\nA,0.3\nB,0.5\nC,0.4\n").unwrap();
        let t = rank_methods(&m, &RankOptions::default()).unwrap();
        let order: Vec<&str> = t.final_order.iter().map(|r| r.method.as_str()).collect();
        assert_eq!(order, ["B", "C", "A"]);
        assert!(t.leaderboard_csv().starts_with("method,substructure,chemical,interaction,geometry,total,rank\nB,,"));
    }

    #[test]
    fn all_absent_column_noted() {
        let m = parse_matrix_csv("method,qed,sa\nA,0.3,-\nB,0.5,NA\n").unwrap();
        let t = rank_methods(&m, &RankOptions::default()).unwrap();
        assert_eq!(t.skipped_metrics, ["sa"]);
        assert_eq!(t.final_order.len(), 2);
    }

    #[test]
    fn method_without_aspect_values_excluded() {
        let m = parse_matrix_csv("method,qed,jsd_at\nA,0.3,0.1\nB,0.5,-\nC,0.4,0.2\n").unwrap();
        let t = rank_methods(&m, &RankOptions::default()).unwrap();
        assert_eq!(t.final_order.len(), 2);
        assert!(t.warnings.iter().any(|w| w.contains("method B")));
    }
}
