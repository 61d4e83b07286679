//! Green-radio tradeoff toolkit: Shannon-limit and practical energy
//! efficiency relations, cell-size planning and deadline-constrained
//! energy-minimal packet scheduling.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod deployment;
pub mod error;
pub mod linkmodel;
pub mod numerics;
pub mod scheduling;
pub mod tradeoffs;

pub use error::{Error, Result};
