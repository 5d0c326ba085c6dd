//! Numerical bounds for the liquid drop model with a neutralizing background.

pub mod energy;
pub mod error;
mod fft;
pub mod fields;
pub mod geometry;
pub mod harness;
pub mod kernels;
pub mod linalg;
pub mod lowerbound;
pub mod quadrature;
pub mod upperbound;

pub use error::{Error, Result};
