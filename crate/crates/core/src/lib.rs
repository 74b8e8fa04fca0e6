//! Little cubes, long knots and alternating quadrisecants.
//!
//! The crate is organised bottom-up: exact cube geometry, the little-cubes
//! operad, PL long knots and tube embeddings, the cube actions, the graphing
//! and spinning constructions, and the quadrisecant count of the type-2
//! invariant with an independent Gauss-diagram oracle.

// NaN must fail range checks, so `!(x > 0.0)` is intended throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod actions;
pub mod error;
pub mod geometry;
pub mod graphing;
pub mod knot;
pub mod operad;
pub mod par;
pub mod quadrisecant;
pub mod tube;

pub use error::{Error, Result};
