//! Numerical laboratory for the Laplace spectrum of complete minimal
//! hypersurfaces in Euclidean space.

pub mod bdgg;
pub mod diagnostics;
pub mod eigensolve;
pub mod error;
pub mod geometry;
pub mod meshing;
pub mod pohozaev;
pub mod sparse;
pub mod surfaces;
pub mod weyl;

pub use error::{Error, Result};
