//! Fibered spectral analysis of the half-plane magnetic Schrödinger operator
//! near its Landau thresholds.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bands;
pub mod effective;
pub mod error;
pub mod fiber;
pub mod numerics;
pub mod potentials;

pub use error::{Error, Result};

/// Crate version, stamped into run reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
