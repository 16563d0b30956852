//! Front end for `biasflow-core`: JSON scenario files in, analysis reports,
//! trajectory CSVs and control schedules out.

pub mod commands;
pub mod error;
pub mod report;
pub mod scenario;

pub use error::CliError;
pub use scenario::{Prepared, Scenario};
