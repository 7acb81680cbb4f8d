//! Command line front end: JSON system descriptions in, reports out.

pub mod commands;
pub mod description;
pub mod format;

pub use commands::{run, Cli, CliError, EXIT_INVALID, EXIT_OK, EXIT_USAGE, EXIT_WARNING};
pub use description::{parse_file, parse_str, Diagnostic, ParseError, SystemDescription};
