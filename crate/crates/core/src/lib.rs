//! Eigenvalues of the Klein-Gordon operator `√(−Δ + m²)` restricted to a
//! bounded domain, and checks of universal eigenvalue inequalities against
//! them.

// `!(x > 0.0)` guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod eigensolve;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod operator;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
