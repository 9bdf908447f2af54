//! Counting cyclic degree-n extensions of Q with local conditions, together with the
//! arithmetic that checks each counting statement against brute force.

pub mod arith;
pub mod census;
pub mod classgroup;
pub mod error;
pub mod family;
pub mod heights;
pub mod sieve;
pub mod zeta;

pub use error::{Error, Result};
