//! Method-by-metric value matrix.
//!
//! ```text
//! # comment lines are ignored
//! method,jsd_at,qed,vina_dock
//! LiGAN,0.1167,0.46,-7.70
//! GraphBP,0.1642,0.44,-
//! ```
//!
//! `-`, `NA` and empty cells are absent values.

use serde::{Deserialize, Serialize};

use super::{metric_spec, RankError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricMatrix {
    pub methods: Vec<String>,
    pub metrics: Vec<String>,
    /// One row per method, aligned with `metrics`.
    pub values: Vec<Vec<Option<f64>>>,
}

fn cell_value(cell: &str, line: usize) -> Result<Option<f64>, RankError> {
    let c = cell.trim();
    if c.is_empty() || c == "-" || c.eq_ignore_ascii_case("na") {
        return Ok(None);
    }
    c.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Some)
        .ok_or_else(|| RankError::Matrix {
            line,
            reason: format!("'{c}' is not a number"),
        })
}

pub fn parse_matrix_csv(text: &str) -> Result<MetricMatrix, RankError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let err = |line: usize, reason: String| RankError::Matrix { line, reason };
    let line_of = |r: &csv::StringRecord| r.position().map_or(0, |p| p.line() as usize);

    let header = loop {
        match records.next() {
            None => return Err(err(1, "no header row".into())),
            Some(Err(e)) => return Err(err(0, e.to_string())),
            Some(Ok(r)) if r.iter().all(str::is_empty) => continue,
            Some(Ok(r)) => break r,
        }
    };
    let hline = line_of(&header);
    if !header.get(0).is_some_and(|h| h.eq_ignore_ascii_case("method")) {
        return Err(err(hline, "first column must be 'method'".into()));
    }
    let metrics: Vec<String> = header.iter().skip(1).map(|h| h.to_ascii_lowercase()).collect();
    for (k, m) in metrics.iter().enumerate() {
        if metric_spec(m).is_none() {
            return Err(err(hline, format!("unknown metric '{m}'")));
        }
        if metrics[..k].contains(m) {
            return Err(err(hline, format!("metric '{m}' appears twice")));
        }
    }

    let mut methods = Vec::new();
    let mut values = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| err(0, e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let line = line_of(&rec);
        if rec.len() != metrics.len() + 1 {
            return Err(err(line, format!("expected {} fields, found {}", metrics.len() + 1, rec.len())));
        }
        let method = rec[0].to_string();
        if method.is_empty() || methods.contains(&method) {
            return Err(err(line, format!("empty or repeated method name '{method}'")));
        }
        values.push(rec.iter().skip(1).map(|c| cell_value(c, line)).collect::<Result<Vec<_>, _>>()?);
        methods.push(method);
    }
    Ok(MetricMatrix {
        methods,
        metrics,
        values,
    })
}
