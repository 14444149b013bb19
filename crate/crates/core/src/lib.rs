//! Exact classification of weighted complete intersections.
//!
//! * [`weights`]: well-formedness of `P(a_0, ..., a_N)`, normalization and
//!   singular strata.
//! * [`analysis`]: general-member classification of a family `X_{d_1..d_k}`.
//! * [`poly`]: sparse weighted-homogeneous polynomials over `Q` and `F_p`.
//! * [`oracle`]: finite-field Jacobian probing and the witness search for
//!   non-quasi-smoothness.
//! * [`census`]: bounded enumeration of families with JSONL output.

pub mod analysis;
pub mod arith;
pub mod census;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod poly;
pub mod weights;

pub use error::{Error, Result};
