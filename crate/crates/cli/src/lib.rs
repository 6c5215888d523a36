//! Command-line front end for `pdm-core`: INI problem files in, CSV tables out.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for solver
//! failures, 1 when output cannot be written.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

pub use config::ProblemConfig;
pub use error::CliError;
pub use table::{fmt_float, Table};
