//! Skew Hadamard difference families from cyclotomic classes of order a
//! power of two, with exact combinatorial certification, character-sum
//! cross-checks, and assembly of the resulting skew Hadamard matrices.

pub mod charsum;
pub mod cli;
pub mod cyclotomy;
pub mod design;
pub mod error;
pub mod gf;
pub mod hadamard;
pub mod numtheory;

pub use error::{Error, Result};
