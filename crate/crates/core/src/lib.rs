//! Histogram density estimation under low-rank nonnegative tensor models.
//!
//! A histogram on `[0,1)^d` with `b` bins per axis is identified with its
//! bin-weight probability tensor of shape `b^d`. Restricting that tensor to a
//! nonnegative CP (multi-view) or Tucker structure gives estimators whose
//! variance grows with the number of components `k` instead of `b^d`.
//!
//! The crate is `no_std` and only needs `alloc`:
//!
//! - [`tensor`]: dense tensors, mode products, reconstructions, simplex projection
//! - [`decomp`]: multiplicative-update nonnegative Tucker and CP fits
//! - [`histogram`]: binning, densities, `L1`/`L2` geometry and empirical risk
//! - [`models`]: ground-truth multi-view and Tucker densities with exact sampling
//! - [`select`]: Scheffé minimum-distance selection over candidate histograms
//! - [`stats`]: Wilcoxon signed-rank test
#![no_std]

extern crate alloc;

pub mod decomp;
pub mod error;
pub mod histogram;
pub mod models;
pub mod rng;
pub mod select;
pub mod stats;
pub mod tensor;

pub use decomp::{fit_prob_tensor, ncp_fit, ntd_fit, CpFactors, FitOptions, Method, TuckerFactors};
pub use error::{Error, Result};
pub use histogram::{HistogramDensity, Sample};
pub use tensor::{DenseTensor, Matrix, ProbTensor, ProbVector};
