#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numeric;

pub use error::{Error, Result};
pub mod characters;
pub mod coefficients;
pub mod lfunc;
pub mod mollifier;
pub mod params;
pub mod weights;
pub mod zeros;
pub mod functional;
pub mod bvp;
pub mod approx;
pub mod sieve_means;
pub mod harness;
