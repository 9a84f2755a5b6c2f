//! Command line front end, file formats and the replicate harness for the
//! GGRF rare-variant association test. The statistics live in `ggrf-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod harness;
pub mod io;
pub mod output;

pub use error::{AppError, AppResult};
