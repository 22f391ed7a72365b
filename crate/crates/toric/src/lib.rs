//! Exact-arithmetic computations on toric varieties given by rational
//! polyhedral fans: intersection numbers with invariant curves, Mori cones and
//! lengths of extremal rays, contractions and weighted blow-ups, and
//! positivity of adjoint divisors.
//!
//! All arithmetic is arbitrary-precision rational; there are no tolerances and
//! no floating point anywhere. See the `cli` module (and the `toric` binary)
//! for the JSON interchange format and the verification harness.

pub mod arith;
pub mod cli;
pub mod cone;
pub mod constructions;
pub mod divisor;
pub mod document;
pub mod error;
pub mod fan;
pub mod intersect;
pub mod matrix;
pub mod mori;
pub mod polyhedron;

pub use error::Error;
