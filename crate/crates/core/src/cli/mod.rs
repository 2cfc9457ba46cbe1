//! Command-line plumbing: configuration, dispatch and CSV output.

pub mod commands;
pub mod config;
pub mod csv;

pub use commands::{config_path, execute, run, Check, Outcome};
pub use config::{parse_config, ProfileKind, RunConfig, Subcommand, KEYS};
pub use csv::{emit_csv, format_csv, parse_csv, read_csv};
