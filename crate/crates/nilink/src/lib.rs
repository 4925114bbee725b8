//! File formats, persistence, the annotation HTTP API and the `nilink`
//! command line on top of `nilink-core`.

pub mod api;
pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod reports;
pub mod store;
pub mod wire;

pub use error::{Error, Result};
