pub mod config;
pub mod dist;
pub mod error;
pub mod ingest;
pub mod ols;
pub mod replicate;
pub mod timeseries;
pub mod unit_root;
pub mod ardl;
pub mod diagnostics;
pub mod simulate;

pub use error::{Error, Result};
