//! Experiment harness for the lattice dislocation toolkit: configuration
//! parsing, scaling-ladder studies, property suites, and CSV/JSON output.

pub mod config;
pub mod report;
pub mod study;
