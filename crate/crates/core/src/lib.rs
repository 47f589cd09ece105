//! Ihara zeta functions of admissible graphs and the entropy built from
//! them.
//!
//! The pipeline runs graph -> oriented line graph -> exact traces -> zeta
//! series -> formal group logarithm -> entropy. Brute-force prime-cycle
//! enumeration and determinant evaluation are kept alongside as
//! independent oracles.

pub mod bivariate;
pub mod entropy;
pub mod error;
pub mod graph;
pub mod line_graph;
pub mod primes;
pub mod registry;
pub mod series;
pub mod zeta;

pub use error::{Error, Result};
