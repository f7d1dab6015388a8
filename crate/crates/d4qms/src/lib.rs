//! File formats, configuration, parallel chain scheduling and the command line front end
//! for `d4qms-core`.

pub mod circuit_json;
pub mod cli;
pub mod commands;
pub mod config;
pub mod dump;
pub mod error;
pub mod manifest;
pub mod records;
pub mod runner;

pub use error::{CliError, CliResult};
