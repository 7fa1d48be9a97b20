//! Lattice oracles, walk-spec files, the solved-grid cache and the
//! command-line front end built on `quarter-green-core`.

pub mod cli;
pub mod error;
pub mod oracle;
pub mod output;
pub mod simulate;
pub mod spec;
pub mod store;

pub use error::{AppError, AppResult};
pub use quarter_green_core as core;
