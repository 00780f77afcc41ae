//! Suites and simulation front end.

pub mod config;
pub mod fixtures;
pub mod report;
pub mod suites;
pub mod simulate;
