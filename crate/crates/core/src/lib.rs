//! Numerical experiments with higher Weierstrass points and Bergman measures
//! on hyperelliptic, rational nodal and degenerating curves.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curves;
pub mod degeneration;
pub mod error;
pub mod jacobian_nodal;
pub mod measures;
pub mod numerics;
pub mod periods;
pub mod validation;
pub mod weierstrass;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
