//! Evaluation toolkit for pocket-conditioned molecule generation.

pub mod chemgraph;
pub mod elements;
pub mod external;
pub mod geom;
pub mod metrics;
pub mod ranking;
pub mod structio;
pub mod taskbuilder;
