// `!(x > 0.0)` is used on purpose throughout so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dd;
pub mod error;
pub mod experiment;
pub mod forward;
pub mod inverse;
pub mod mlf;
pub mod problem;
pub mod quad;
pub mod spectral;

pub use error::{Error, Result};
