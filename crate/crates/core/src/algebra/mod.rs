//! Coefficient field, multi-indices, truncated jets and small linear algebra.

pub mod jet;
pub mod linalg;
pub mod monomial;
pub mod scalar;

pub use jet::Jet;
pub use linalg::{Matrix, Module};
pub use monomial::MultiIndex;
pub use scalar::Scalar;
