//! Evaluation reports and their deterministic JSON/CSV serialization.
//!
//! JSON layout (keys always sorted, numbers with four decimals, absent
//! values as `null`):
//!
//! ```text
//! {"aspects": {"<aspect>": {"<metric>": 0.1167, ...}, ...},
//!  "counts": {"<name>": 12, ...},
//!  "errors": ["..."],
//!  "label": "<method or pocket>",
//!  "warnings": ["..."]}
//! ```
//!
//! CSV layout: header `label,aspect,metric,value`, one row per metric,
//! sorted by aspect then metric, empty value for absent.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub label: String,
    #[serde(default)]
    pub aspects: BTreeMap<String, BTreeMap<String, Option<f64>>>,
    #[serde(default)]
    pub counts: BTreeMap<String, u64>,
    #[serde(default)]
    pub warnings: Vec<String>,
    #[serde(default)]
    pub errors: Vec<String>,
}

impl MetricReport {
    pub fn new(label: impl Into<String>) -> Self {
        MetricReport {
            label: label.into(),
            ..Default::default()
        }
    }

    pub fn set(&mut self, aspect: &str, metric: &str, value: Option<f64>) {
        self.aspects
            .entry(aspect.to_string())
            .or_default()
            .insert(metric.to_string(), value);
    }

    pub fn get(&self, aspect: &str, metric: &str) -> Option<f64> {
        self.aspects.get(aspect)?.get(metric).copied().flatten()
    }

    /// True when at least one aspect carries at least one present value.
    pub fn is_complete(&self) -> bool {
        self.aspects
            .values()
            .any(|m| m.values().any(|v| v.is_some_and(f64::is_finite)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReportError {
    #[error("report '{0}' has no aspect with a computed value")]
    Incomplete(String),
}

fn fmt_value(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => {
            let s = format!("{x:.4}");
            if s == "-0.0000" {
                "0.0000".to_string()
            } else {
                s
            }
        }
        _ => "null".to_string(),
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn json_list(items: &[String]) -> String {
    let inner: Vec<String> = items.iter().map(|s| json_str(s)).collect();
    format!("[{}]", inner.join(", "))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_report(report: &MetricReport, format: ReportFormat) -> Result<Vec<u8>, ReportError> {
    if !report.is_complete() {
        return Err(ReportError::Incomplete(report.label.clone()));
    }
    let mut s = String::new();
    match format {
        ReportFormat::Json => {
            s.push_str("{\n  \"aspects\": {");
            for (i, (aspect, metrics)) in report.aspects.iter().enumerate() {
                s.push_str(if i == 0 { "\n" } else { ",\n" });
                let _ = write!(s, "    {}: {{", json_str(aspect));
                for (j, (metric, value)) in metrics.iter().enumerate() {
                    s.push_str(if j == 0 { "\n" } else { ",\n" });
                    let _ = write!(s, "      {}: {}", json_str(metric), fmt_value(*value));
                }
                s.push_str("\n    }");
            }
            s.push_str("\n  },\n  \"counts\": {");
            for (i, (name, n)) in report.counts.iter().enumerate() {
                s.push_str(if i == 0 { "\n" } else { ",\n" });
                let _ = write!(s, "    {}: {}", json_str(name), n);
            }
            if !report.counts.is_empty() {
                s.push_str("\n  ");
            }
            let _ = write!(
                s,
                "}},\n  \"errors\": {},\n  \"label\": {},\n  \"warnings\": {}\n}}\n",
                json_list(&report.errors),
                json_str(&report.label),
                json_list(&report.warnings)
            );
        }
        ReportFormat::Csv => {
            s.push_str("label,aspect,metric,value\n");
            for (aspect, metrics) in &report.aspects {
                for (metric, value) in metrics {
                    let v = match fmt_value(*value).as_str() {
                        "null" => String::new(),
                        other => other.to_string(),
                    };
                    let _ = writeln!(
                        s,
                        "{},{},{},{}",
                        csv_field(&report.label),
                        csv_field(aspect),
                        csv_field(metric),
                        v
                    );
                }
            }
        }
    }
    Ok(s.into_bytes())
}
