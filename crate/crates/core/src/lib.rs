//! Full counting statistics of energy transfer and Rényi entropy flows for a
//! thermal probe weakly coupled to a driven quantum system.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod commands;
pub mod config;
pub mod error;
pub mod fcs;
pub mod linalg;
pub mod models;
pub mod oracle;
pub mod random;
pub mod report;
pub mod rflow;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
