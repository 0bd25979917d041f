//! Linear-feedback capacity regions of two-user Gaussian MACs and BCs.

pub mod blockmat;
pub mod duality;
pub mod error;
pub mod frontier;
pub mod mimo;
pub mod simkit;
pub mod siso;

pub use blockmat::{BlockTriangularSet, DenseMatrix};
pub use error::{LinfbError, Result};
pub use frontier::RegionFrontier;
