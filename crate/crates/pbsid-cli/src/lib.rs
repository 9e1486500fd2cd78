//! Command implementations and persistence for the `pbsid` binary.

pub mod commands;
pub mod io;
