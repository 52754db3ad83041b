//! Command-line front end: model files, command dispatch and reports.

pub mod commands;
pub mod error;
pub mod model_file;
pub mod report;

pub use commands::{run, Command, Options, Outcome};
pub use error::CliError;
pub use report::{emit, Format};
