//! Command-line harness for the `qpsi-core` simulator: configuration,
//! experiment drivers, classical oracle, resource accounting and reports.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod oracle;
pub mod report;
pub mod resources;
pub mod stats;
