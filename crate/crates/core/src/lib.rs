//! Certified fixed point indices on compact domains with collars.
//!
//! The crate computes, with integer-valued certificates, the fixed point
//! index `I(f)` of a map `f: M -> M'` into the collared domain, the index of
//! the retracted map on the exit set of the boundary, and the Lefschetz
//! number `L(rf)`, and checks the identity `I(f) + I(rf|exit) = L(rf)`
//! together with its corollaries.

pub mod cli;
pub mod collar_formula;
pub mod degree;
pub mod domains;
pub mod error;
pub mod fpindex;
pub mod homology;
pub mod mapexpr;

pub use error::{Error, Result};
pub use mapexpr::{EvalError, FnMap, MapExpr, ParseError, VectorMap};
