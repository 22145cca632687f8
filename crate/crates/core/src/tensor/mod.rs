//! Symmetric tensors over a finite set of bins and truncated power series
//! whose coefficients are such tensors.

pub mod json;
pub mod linear;
pub mod multiset;
pub mod scalar;
pub mod series;
pub mod sym;

pub use linear::LinearMap;
pub use scalar::Scalar;
pub use series::GradedSeries;
pub use sym::{SymTensor, MAX_BINS, MAX_DEGREE};
