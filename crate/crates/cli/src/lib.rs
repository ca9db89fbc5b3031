//! Experiment runner behind the `dirac-reduce` binary.

pub mod commands;
pub mod config;
pub mod experiments;
pub mod report;
