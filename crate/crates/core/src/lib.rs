//! Relative prediction accuracy built on the log accuracy ratio
//! `lnQ = ln(predicted / actual)`.
//!
//! - [`metrics`]: MAPE, SMAPE, MER, `Σ(lnQ)²`, LSD and the Törnqvist family.
//! - [`estimators`]: constant, linear and power fits under MAPE, `Σ(lnQ)²`,
//!   OLS and LAD, with accuracy-ratio diagnostics.
//! - [`simulator`]: seeded Monte Carlo model-selection experiments.
//! - [`dataio`]: CSV ingestion, table output and residual bar charts.
//! - [`cli`]: the `lnq` command-line front end.

// `!(v > 0.0)` is used deliberately so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dataio;
pub mod error;
pub mod estimators;
pub mod metrics;
pub mod simulator;

pub use error::{Error, Result};
