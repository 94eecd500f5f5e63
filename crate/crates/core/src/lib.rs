#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod field;
pub mod geometry;
pub mod impedance;
pub mod mfs;
pub mod mie;
pub mod special;

pub use error::{Error, Result};
