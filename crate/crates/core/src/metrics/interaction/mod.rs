//! Binding affinity and interaction-pattern metrics.

pub mod affinity;
pub mod docking;
pub mod profiler;

use std::collections::BTreeMap;

pub use affinity::{affinity_metrics, AffinityMode, AffinityRecord, AffinitySummary, PocketAffinity};
pub use docking::{parse_docking_output, parse_scores_csv, DockCommand, DockError, EnergySource, Ordinal, ScoreTable};
pub use profiler::{
    profile_interactions, profile_with, InteractionProfile, InteractionType, PocketFeatures, ProfileError,
    ProfilerThresholds, INTERACTION_LABELS,
};

use super::distribution::{jsd, mae_vectors, CategoricalDistribution, JsdConvention};

/// Interaction profiles of one pocket's generated molecules and its reference.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PocketProfiles {
    pub pocket_id: String,
    pub generated: Vec<InteractionProfile>,
    pub reference: Vec<InteractionProfile>,
}

fn distribution(profiles: &[InteractionProfile]) -> CategoricalDistribution {
    let mut d = CategoricalDistribution::new(&INTERACTION_LABELS);
    for p in profiles {
        d.add(&p.as_f64());
    }
    d
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// `jsd_oa`, `mae_oa` over all pockets pooled; `jsd_pp`, `mae_pp` per
/// pocket, then averaged.
pub fn interaction_distribution_metrics(
    pockets: &[PocketProfiles],
    convention: JsdConvention,
    warnings: &mut Vec<String>,
) -> BTreeMap<String, Option<f64>> {
    let usable: Vec<&PocketProfiles> = pockets
        .iter()
        .filter(|p| !p.generated.is_empty() && !p.reference.is_empty())
        .collect();
    let mut gen_all = CategoricalDistribution::new(&INTERACTION_LABELS);
    let mut ref_all = CategoricalDistribution::new(&INTERACTION_LABELS);
    let mut jsd_pp = Vec::new();
    let mut mae_pp = Vec::new();
    for p in &usable {
        let (g, r) = (distribution(&p.generated), distribution(&p.reference));
        match jsd(&g, &r, convention) {
            Ok(v) => jsd_pp.push(v),
            Err(_) => warnings.push(format!("pocket {}: no interactions on one side, skipped for jsd_pp", p.pocket_id)),
        }
        mae_pp.extend(mae_vectors(&g.mean_frequency(), &r.mean_frequency()));
        gen_all.merge(&g).expect("same labels");
        ref_all.merge(&r).expect("same labels");
    }
    let (jsd_oa, mae_oa) = if usable.is_empty() {
        warnings.push("interaction patterns: no pocket with both generated and reference profiles".into());
        (None, None)
    } else {
        (
            jsd(&gen_all, &ref_all, convention).ok(),
            mae_vectors(&gen_all.mean_frequency(), &ref_all.mean_frequency()),
        )
    };
    BTreeMap::from([
        ("jsd_oa".to_string(), jsd_oa),
        ("mae_oa".to_string(), mae_oa),
        ("jsd_pp".to_string(), mean(&jsd_pp)),
        ("mae_pp".to_string(), mean(&mae_pp)),
    ])
}
