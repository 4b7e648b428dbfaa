//! Experiment runner and file formats around `colorlab-core`.
//!
//! [`experiments::run_experiment`] takes an [`config::ExperimentConfig`] and
//! returns tables ([`table::Document`]), plot series and side files; nothing
//! touches the filesystem until [`experiments::write_report`].

pub mod config;
pub mod digest;
pub mod experiments;
pub mod io;
pub mod plot;
pub mod table;

pub use config::{Command, ExperimentConfig};
pub use experiments::{run_experiment, run_with_jobs, write_report, RunError, RunReport};
