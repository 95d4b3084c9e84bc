//! Experiment harness for the Büchi-automaton GCN pipeline: dataset
//! generation, training runs, accuracy tables and the `n_add` sweep, plus the
//! `nbwgnn` command line front end.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod report;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use report::{CellReport, ExperimentReport};
