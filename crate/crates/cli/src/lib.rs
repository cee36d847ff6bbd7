//! Command-line front end for `fiberent`: JSON run configurations in, CSV
//! tables and SVG charts out.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod svg;

pub use error::CliError;
