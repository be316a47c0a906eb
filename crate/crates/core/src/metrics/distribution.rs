//! Labeled categorical distributions, Jensen-Shannon comparison and
//! mean-frequency MAE.
//!
//! Two JSD conventions are offered. `Distance` is the square root of the
//! natural-log divergence (bounded by sqrt(ln 2) ~ 0.8326), the reading
//! that reproduces the published tables; `Base2` is the base-2 divergence
//! bounded by 1.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("label sets differ")]
    Alignment,
    #[error("no molecules given")]
    EmptySet,
    #[error("distribution has no mass")]
    NoMass,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JsdConvention {
    #[default]
    Distance,
    Base2,
}

/// Counts per label accumulated over molecules. Probabilities and mean
/// frequencies are derived on demand, so merging is plain addition.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalDistribution {
    pub labels: Vec<String>,
    pub totals: Vec<f64>,
    pub molecules: usize,
}

impl CategoricalDistribution {
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Self {
        CategoricalDistribution {
            labels: labels.iter().map(|s| s.as_ref().to_string()).collect(),
            totals: vec![0.0; labels.len()],
            molecules: 0,
        }
    }

    /// Adds one molecule's counts (aligned with `labels`).
    pub fn add(&mut self, counts: &[f64]) {
        assert_eq!(counts.len(), self.totals.len(), "count vector length");
        for (t, c) in self.totals.iter_mut().zip(counts) {
            *t += c;
        }
        self.molecules += 1;
    }

    pub fn merge(&mut self, other: &CategoricalDistribution) -> Result<(), DistributionError> {
        if self.labels != other.labels {
            return Err(DistributionError::Alignment);
        }
        for (t, o) in self.totals.iter_mut().zip(&other.totals) {
            *t += o;
        }
        self.molecules += other.molecules;
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.totals.iter().sum()
    }

    /// True when no label was ever counted.
    pub fn is_empty(&self) -> bool {
        self.total() <= 0.0
    }

    /// Normalized totals; all zeros for an empty distribution.
    pub fn probabilities(&self) -> Vec<f64> {
        let t = self.total();
        if t <= 0.0 {
            return vec![0.0; self.totals.len()];
        }
        self.totals.iter().map(|x| x / t).collect()
    }

    /// Mean count per molecule.
    pub fn mean_frequency(&self) -> Vec<f64> {
        if self.molecules == 0 {
            return vec![0.0; self.totals.len()];
        }
        self.totals.iter().map(|x| x / self.molecules as f64).collect()
    }
}

fn kl_term(p: f64, m: f64) -> f64 {
    if p > 0.0 {
        p * (p / m).ln()
    } else {
        0.0
    }
}

/// JSD of two non-negative vectors, normalized first. `None` when either
/// has no mass or the lengths differ.
pub fn jsd_vectors(p: &[f64], q: &[f64], convention: JsdConvention) -> Option<f64> {
    if p.len() != q.len() {
        return None;
    }
    let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
    if sp <= 0.0 || sq <= 0.0 {
        return None;
    }
    let mut div = 0.0;
    for (a, b) in p.iter().zip(q) {
        let (a, b) = (a / sp, b / sq);
        let m = 0.5 * (a + b);
        div += 0.5 * kl_term(a, m) + 0.5 * kl_term(b, m);
    }
    let div = div.max(0.0);
    Some(match convention {
        JsdConvention::Distance => div.sqrt(),
        JsdConvention::Base2 => (div / std::f64::consts::LN_2).min(1.0),
    })
}

pub fn jsd(
    p: &CategoricalDistribution,
    q: &CategoricalDistribution,
    convention: JsdConvention,
) -> Result<f64, DistributionError> {
    if p.labels != q.labels {
        return Err(DistributionError::Alignment);
    }
    jsd_vectors(&p.totals, &q.totals, convention).ok_or(DistributionError::NoMass)
}

/// Mean over labels of |f_gen - f_ref|.
pub fn mae_vectors(gen: &[f64], reference: &[f64]) -> Option<f64> {
    if gen.len() != reference.len() || gen.is_empty() {
        return None;
    }
    let s: f64 = gen.iter().zip(reference).map(|(a, b)| (a - b).abs()).sum();
    Some(s / gen.len() as f64)
}

pub fn mae_frequency(
    gen: &CategoricalDistribution,
    reference: &CategoricalDistribution,
) -> Result<f64, DistributionError> {
    if gen.labels != reference.labels {
        return Err(DistributionError::Alignment);
    }
    if gen.molecules == 0 || reference.molecules == 0 {
        return Err(DistributionError::EmptySet);
    }
    mae_vectors(&gen.mean_frequency(), &reference.mean_frequency()).ok_or(DistributionError::Alignment)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_zero() {
        let p = [0.2, 0.3, 0.5];
        for c in [JsdConvention::Distance, JsdConvention::Base2] {
            assert!(jsd_vectors(&p, &p, c).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn disjoint_supports_hit_the_bound() {
        let b2 = jsd_vectors(&[1.0, 0.0], &[0.0, 1.0], JsdConvention::Base2).unwrap();
        assert!((b2 - 1.0).abs() < 1e-12);
        let d = jsd_vectors(&[1.0, 0.0], &[0.0, 1.0], JsdConvention::Distance).unwrap();
        assert!((d - std::f64::consts::LN_2.sqrt()).abs() < 1e-12);
        assert!((d - 0.8326).abs() < 5e-5);
    }

    #[test]
    fn inputs_are_normalized() {
        let a = jsd_vectors(&[1.0, 3.0], &[2.0, 2.0], JsdConvention::Distance).unwrap();
        let b = jsd_vectors(&[0.25, 0.75], &[0.5, 0.5], JsdConvention::Distance).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn label_mismatch_is_an_error() {
        let p = CategoricalDistribution::new(&["C", "N"]);
        let q = CategoricalDistribution::new(&["C", "O"]);
        assert_eq!(jsd(&p, &q, JsdConvention::Base2), Err(DistributionError::Alignment));
        assert_eq!(mae_frequency(&p, &q), Err(DistributionError::Alignment));
    }

    #[test]
    fn hand_counted_molecules() {
        // {C,C,O} and {N}
        let mut d = CategoricalDistribution::new(&["C", "N", "O"]);
        d.add(&[2.0, 0.0, 1.0]);
        d.add(&[0.0, 1.0, 0.0]);
        assert_eq!(d.probabilities(), vec![0.5, 0.25, 0.25]);
        assert_eq!(d.mean_frequency(), vec![1.0, 0.5, 0.5]);
    }

    #[test]
    fn mae_examples() {
        assert_eq!(mae_vectors(&[2.0, 0.0], &[0.0, 2.0]), Some(2.0));
        let m = mae_vectors(&[1.5, 0.5, 1.0], &[1.0, 1.0, 1.0]).unwrap();
        assert!((m - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn merge_equals_joint_accumulation() {
        let mut a = CategoricalDistribution::new(&["x", "y"]);
        let mut b = a.clone();
        let mut all = a.clone();
        a.add(&[1.0, 2.0]);
        b.add(&[3.0, 0.0]);
        all.add(&[1.0, 2.0]);
        all.add(&[3.0, 0.0]);
        a.merge(&b).unwrap();
        assert_eq!(a, all);
    }
}
