//! Software reliability estimation: debugging economics, double-execution
//! planning, and the Schumann, Jelinski-Moranda, Weibull and Nelson models
//! with parameter estimation, asymptotic uncertainty and seeded synthetic
//! data generators.

// `!(a > b)` is used on purpose so that NaN inputs fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod economics;
pub mod error;
pub mod fault_tolerance;
pub mod jm;
pub mod nelson;
pub mod numerics;
pub mod schumann;
pub mod uncertainty;
pub mod weibull;

pub use error::{Error, ErrorClass, Result};
pub use uncertainty::{ParamInterval, Uncertainty, DEFAULT_CI_LEVEL};
