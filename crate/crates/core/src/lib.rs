//! Numerical laboratory for four-dimensional curvature: pointwise Weyl /
//! Schouten splitting with the self-dual and anti-self-dual parts, the
//! conformal invariants built from them, randomized checks of the
//! algebraic curvature inequalities, and Ricci flow on homogeneous models.
//!
//! The crate is `no_std` (with `alloc`). Enable `parallel` to spread chart
//! quadrature and fuzz campaigns over a rayon pool, `serde` for report
//! serialization.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::large_enum_variant)]

extern crate alloc;

pub mod curvature;
pub mod error;
pub mod flow;
pub mod inequality;
pub mod invariants;
pub mod linalg;
pub mod zoo;

pub use error::{LabError, Result};
