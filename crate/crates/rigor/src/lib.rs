//! File formats, experiment harness and command line for `rigor-core`.

pub mod cli;
pub mod experiments;
pub mod io;
