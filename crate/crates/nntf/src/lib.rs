//! Experiment harness and file formats for tensor-factorized histograms.
//!
//! [`nntf_core`] holds the estimators; this crate adds what needs `std`:
//! CSV ingestion, dimensionality reduction, the cross-validated experiment
//! loop, and the text formats read and written by the `nntf` binary.

pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod formats;
pub mod keyvalue;
pub mod reduce;
pub mod report;

pub use error::{Error, Result};
