//! Exact computation with metric Lie algebras given by structure constants,
//! specialized to Milnor frames.
//!
//! Indices are 0-based throughout the library; the command-line front end
//! reads and writes 1-based indices.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod frames;
pub mod geometry;
pub mod linalg;
pub mod milnor;
pub mod poly;
pub mod scalar;
pub mod soliton;

pub use algebra::LieAlgebra;
pub use error::{Error, Result};
pub use geometry::{InnerProduct, MetricLieAlgebra};
pub use linalg::{Matrix, Subspace, Vector};
pub use milnor::{Decomposition, MilnorData, SummandKind};
pub use scalar::Rational;
