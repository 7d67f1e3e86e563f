//! File formats, parallel drivers, plotting and the command line for
//! `adjviz-core`.

pub mod commands;
pub mod error;
pub mod files;
pub mod number;
pub mod parallel;
pub mod plot;

pub use commands::{parse_args, run, Cli};
pub use error::{AppError, Result};
