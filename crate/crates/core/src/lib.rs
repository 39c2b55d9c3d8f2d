//! Arithmetic terms, exponential Diophantine systems and closed-form
//! counting of special primes.

pub mod budget;
pub mod counters;
pub mod error;
pub mod expdio;
pub mod generators;
pub mod mazzanti;
pub mod oracles;
#[cfg(test)]
mod props;
pub mod sequences;
pub mod term;
pub mod verify;

pub use budget::Budget;
pub use error::{Error, Result};
