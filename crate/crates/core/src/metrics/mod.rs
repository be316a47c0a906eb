//! Evaluation metrics for the four aspects.

pub mod chem;
pub mod clash;
pub mod crippen;
pub mod distribution;
pub mod geometry;
pub mod interaction;
pub mod substructure;

pub use distribution::{jsd, jsd_vectors, mae_frequency, CategoricalDistribution, DistributionError, JsdConvention};
