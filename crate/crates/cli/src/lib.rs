//! Command implementations behind the `pocketbench` binary.

pub mod commands;
pub mod config;
pub mod eval;
