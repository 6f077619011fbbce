//! Numerical potential theory on a handful of model domains.
//!
//! The crate evaluates classical Green functions and Poisson kernels on the
//! unit disk and the real 3-ball, pluricomplex Green functions on the complex
//! 2-ball and the bidisk, builds certified norming weights by exhaustion, and
//! realizes the space `L¹(M, V)` on a fixed seeded discretization so that
//! normalized Green functions and their boundary limits can be compared as
//! plain vectors.
//!
//! Everything here is pure computation; file formats, reports and the
//! command-line harness live in the companion `ppkit` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod classical;
pub mod compactification;
pub mod domain;
mod error;
pub mod l1;
pub mod norming;
pub mod numeric;
pub mod pluri;
mod point;
pub mod sampling;

pub use error::{Error, Result};
pub use point::Point;
