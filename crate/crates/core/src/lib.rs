// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod lab;
pub mod level_sets;
pub mod maps;
pub mod modulus;
pub mod runner;

pub use error::{Error, Result};
