//! Library surface of the CLI so integration tests exercise the same code
//! paths the binary runs.

pub mod cmd_align;
pub mod cmd_compare;
pub mod cmd_simulate;
pub mod config;
pub mod csvio;
pub mod errors;
pub mod report;
