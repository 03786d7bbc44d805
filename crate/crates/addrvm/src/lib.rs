//! Session files and the command-line driver for addressing machines.

pub mod cli;
pub mod format;
pub mod session;
