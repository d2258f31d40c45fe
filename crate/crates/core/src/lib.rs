//! Large-deviation rate functions for the top eigenvalue of sparse Wigner
//! matrices, and Monte Carlo experiments around them.

pub mod entry_laws;
pub mod error;
pub mod experiments;
pub mod legendre;
pub mod matrix_lab;
pub mod numeric;
pub mod rate_functions;
pub mod rng;
pub mod semicircle;

pub use error::{Error, Result};
