//! Command-line front end: frame files, reports and the `gfusion` commands.

pub mod commands;
pub mod format;

pub use commands::{run, Cli, CliError, Outcome};
pub use format::{frame_from_json, frame_to_json, FormatError, FrameSpecFile};
