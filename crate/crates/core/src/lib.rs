#![no_std]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
extern crate alloc;

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod experiment;
pub mod grid;
pub mod linalg;
mod math;
pub mod model;
pub mod spectral;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64;
