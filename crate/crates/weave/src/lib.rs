//! File formats, output plumbing and the command-line front end for
//! `weave-core`.

pub mod cli;
pub mod commands;
pub mod error;
pub mod io;
pub mod json;
pub mod output;
pub mod schema;
pub mod svg;

pub use error::{CliError, Result, EXIT_INPUT, EXIT_NUMERICAL};
