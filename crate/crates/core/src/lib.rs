// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod conjugate;
pub mod csvio;
pub mod eof;
pub mod error;
pub mod gls_core;
pub mod inverse_problem;
pub mod norms;
pub mod optimize;
pub mod orlicz;
pub mod report;
pub mod scalar_fn;

pub use error::{Error, Result};
