//! Command-line front end: a text format for schemas, instances, functors and
//! transformations, loaders for CSV, JSON and edge-list data, and the
//! `catlift` commands.

pub mod commands;
pub mod dsl;
pub mod ingest;
pub mod report;
pub mod workspace;

pub use commands::run_with;
pub use workspace::Workspace;
