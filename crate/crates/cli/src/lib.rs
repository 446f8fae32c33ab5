//! Library surface of the `redmap` command-line tool: run configuration,
//! report emission and subcommand execution, split out so integration tests
//! can drive the same code paths the binary uses.

pub mod config;
pub mod report;
pub mod run;
