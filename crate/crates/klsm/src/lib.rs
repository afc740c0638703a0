//! Half-integral weight Kloosterman sums for the Dedekind eta and theta
//! multipliers, computed exactly as multisets of roots of unity, together
//! with the Bessel transforms that pair with them in the trace formula,
//! coefficient-level Hecke and Shimura operations, and the Rademacher series
//! for the partition function as an end-to-end check.

pub mod arith;
pub mod dd;
pub mod error;
pub mod exactsum;
pub mod hecke;
pub mod kloosterman;
pub mod multiplier;
pub mod rademacher;
pub mod scan;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
