//! Command-line front end for the meetplan scheduler.

mod commands;
pub mod render;

pub use commands::{run, Cli, Command};

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const INFEASIBLE: u8 = 2;
    pub const TIMEOUT: u8 = 3;
    pub const VIOLATIONS: u8 = 4;
}
