//! Chemical perception on molecular graphs.

pub mod bonds;
pub mod fgroups;
pub mod murcko;
pub mod perception;
pub mod rings;
pub mod smarts;
pub mod validity;

use thiserror::Error;

use crate::structio::GraphError;

pub use bonds::{assign_bond_orders, connect, perceive_bonds, perceive_bonds_with};
pub use fgroups::{
    count_functional_groups, default_library, match_functional_groups, parse_library, FunctionalGroupPattern,
};
pub use murcko::{murcko_decompose, MurckoDecomposition};
pub use perception::{perceive, rotatable_bond_count, Perceived};
pub use rings::{cyclomatic_number, find_rings};
pub use validity::{
    largest_fragment, reconstruct_and_validate, reconstruct_with, ReconstructionPath, ValidityOptions, ValidityVerdict,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChemError {
    #[error("no atoms given")]
    EmptyInput,
    #[error("atoms {a} and {b} are {distance:.3} A apart (below the minimum bond distance)")]
    DegenerateGeometry { a: usize, b: usize, distance: f64 },
    #[error("functional-group library: {0}")]
    Library(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
