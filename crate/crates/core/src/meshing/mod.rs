//! Triangulation, P1 finite elements, quadrature and OFF export.

mod fem;
mod mesh;
mod off;
pub mod quadrature;

pub use fem::{assemble, element_matrices, FemPair};
pub use mesh::{ball_mesh, triangulate, TriMesh, MIN_TRIANGLE_AREA};
pub use off::{to_off, write_off};
pub(crate) use quadrature::region_box;
pub use quadrature::{
    extrinsic_ball_volume, integrate, region_volume, volume_density, BallVolume, Integral,
    QuadratureOptions, Region,
};
