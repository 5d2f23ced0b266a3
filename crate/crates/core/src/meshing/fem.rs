use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

use super::mesh::{TriMesh, MIN_TRIANGLE_AREA};

/// P1 stiffness and consistent mass matrices of a triangle mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct FemPair {
    pub k: CsrMatrix,
    pub m: CsrMatrix,
    /// `interior[new] = vertex` for the Dirichlet-reduced system.
    pub interior: Vec<usize>,
}

impl FemPair {
    /// Stiffness and mass restricted to interior vertices.
    pub fn reduced(&self) -> (CsrMatrix, CsrMatrix) {
        (
            self.k.principal_submatrix(&self.interior),
            self.m.principal_submatrix(&self.interior),
        )
    }

    /// Extends a reduced vector by zero on the boundary.
    pub fn extend(&self, reduced: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.k.nrows()];
        for (v, &i) in reduced.iter().zip(&self.interior) {
            full[i] = *v;
        }
        full
    }

    /// `∫‖∇u‖² / ∫u²` for nodal values `u`.
    pub fn rayleigh_quotient(&self, u: &[f64]) -> f64 {
        self.k.quadratic_form(u) / self.m.quadratic_form(u)
    }
}

/// Element matrices of a triangle from its embedded vertices:
/// `Kᵢⱼ = ⟨eᵢ, eⱼ⟩ / 4A` with `eᵢ` the edge opposite vertex `i` (the cotangent
/// formula) and `M = A/12 · (1 + δᵢⱼ)`.
pub fn element_matrices(p: [[f64; 3]; 3]) -> Option<([[f64; 3]; 3], [[f64; 3]; 3], f64)> {
    let e = |i: usize| {
        let (a, b) = (p[(i + 1) % 3], p[(i + 2) % 3]);
        [b[0] - a[0], b[1] - a[1], b[2] - a[2]]
    };
    let edges = [e(0), e(1), e(2)];
    let (u, v) = (edges[2], [-edges[1][0], -edges[1][1], -edges[1][2]]);
    let c = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let area = 0.5 * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    if !(area > MIN_TRIANGLE_AREA) {
        return None;
    }
    let mut k = [[0.0; 3]; 3];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let d =
                edges[i][0] * edges[j][0] + edges[i][1] * edges[j][1] + edges[i][2] * edges[j][2];
            k[i][j] = d / (4.0 * area);
            m[i][j] = area / 12.0 * if i == j { 2.0 } else { 1.0 };
        }
    }
    Some((k, m, area))
}

pub fn assemble(mesh: &TriMesh) -> Result<FemPair> {
    let n = mesh.vertex_count();
    let mut kt = Vec::with_capacity(9 * mesh.triangle_count());
    let mut mt = Vec::with_capacity(9 * mesh.triangle_count());
    for (index, tri) in mesh.triangles.iter().enumerate() {
        let p = [
            mesh.points[tri[0]],
            mesh.points[tri[1]],
            mesh.points[tri[2]],
        ];
        let (ke, me, _) = element_matrices(p).ok_or_else(|| Error::DegenerateTriangle {
            index,
            area: mesh.triangle_area(index),
        })?;
        for i in 0..3 {
            for j in 0..3 {
                kt.push((tri[i], tri[j], ke[i][j]));
                mt.push((tri[i], tri[j], me[i][j]));
            }
        }
    }
    let interior = (0..n).filter(|&v| !mesh.boundary[v]).collect();
    Ok(FemPair {
        k: CsrMatrix::from_triplets(n, n, &kt),
        m: CsrMatrix::from_triplets(n, n, &mt),
        interior,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_triangle_stiffness() {
        let (k, m, area) =
            element_matrices([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        let expect = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[i][j] - expect[i][j]).abs() < 1e-15);
            }
        }
        assert_eq!(area, 0.5);
        assert!((m[0][0] - 1.0 / 12.0).abs() < 1e-15);
    }
}
