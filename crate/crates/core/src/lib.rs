//! Exact arithmetic for thin subsets of the circle group: digit expansions
//! over arithmetic sequences, ideal convergence, and witness certificates.

pub mod arith;
pub mod error;
pub mod ideals;
pub mod rational;
pub mod thinsets;
pub mod witnesses;

pub use error::{Error, Result};
pub use rational::Rational;
