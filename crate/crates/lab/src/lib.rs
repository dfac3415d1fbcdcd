//! Experiment driver for `eqdist-core`: expression and point formats,
//! JSON configs, report files, run manifests, parallel pullbacks and the
//! acceptance suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod expr;
pub mod format;
pub mod manifest;
pub mod parallel;
pub mod report;
pub mod run;
pub mod suite;

pub use error::{LabError, LabResult};
