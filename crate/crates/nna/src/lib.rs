//! File formats, instance generators and the command line for the `nna-core`
//! solvers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod generate;
pub mod mtx;
pub mod trace;

pub use error::IoError;
