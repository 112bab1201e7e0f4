//! Command implementations behind the `alcurve` binary.

pub mod commands;
pub mod server;
