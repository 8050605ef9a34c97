//! File formats and command implementations behind the `mpemba` binary.

pub mod args;
pub mod commands;
pub mod error;
pub mod grid_spec;
pub mod output;

pub use commands::run;
pub use error::{CliError, Result};
