//! Experiments, CSV/SVG output and the `spinlimit` command-line tool built on
//! [`spinlimit_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod svg;
pub mod table;

pub use config::{Engine, ExperimentConfig, InitialCondition, Settings};
pub use error::{AppError, AppResult};
pub use experiments::{ComparisonReport, DeviationRow};
pub use table::Table;
