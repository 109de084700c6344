pub mod algebra;
pub mod error;

pub use algebra::{Jet, Matrix, MultiIndex, Scalar};
pub use error::{PnfError, Result};
pub mod polyvector;

pub use polyvector::{DiffeoJet, PolyVector};
pub mod spectrum;
pub use spectrum::LinearFamily;
pub mod normalform;
pub mod pipeline;
pub mod serial;
pub mod report;
