//! Polynomials, rational functions, root finding, quadrature and small dense
//! linear algebra over the complex numbers.

pub mod extended;
pub mod linalg;
pub mod poly;
pub mod quad;
pub mod roots;

pub use linalg::{hermitian_factor, nullspace, vanishing_orders, CMat};
pub use poly::{CPoly, CRat};
pub use quad::{area_integral, path_integral, Path, Region};
pub use roots::{poly_roots, RootOptions};
