//! Command-line front end: CSV problem and scheme files in, reservation
//! tables, rosters, JSON reports and long-format bias series out.

pub mod commands;
pub mod error;
pub mod io;
pub mod report;
pub mod synth;

pub use commands::{execute, Cli};
pub use error::{CliError, CliResult};
