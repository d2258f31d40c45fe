//! Scalar numerics shared by the rate-function and sampling code: bracketed
//! root finding, derivative-free 1-D minimization and adaptive quadrature.

mod optimize;
mod quad;
mod roots;

pub use optimize::{golden_max, golden_min, scan_then_golden, Extremum};
pub use quad::{integrate, integrate_to_infinity, QuadOptions};
pub use roots::{bisect, bisect_expanding, RootOptions};
