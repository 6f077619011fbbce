//! File formats, JSON reports, the acceptance suite and the `ppkit`
//! command-line harness on top of `ppkit-core`.

pub mod acceptance;
pub mod cli;
pub mod commands;
pub mod io;
pub mod report;
