use crate::diagnostics::XiBand;
use crate::error::{Error, Result};

use super::ReducedSolution;

/// Bands of `|dr̃(ν)|` for the graph `x ↦ f(u, v)` over `R^{2m}` about the
/// ambient origin, grouped by `r̃ = √(u² + v² + f²)` into the shells
/// `[shells[k], shells[k+1])`.
///
/// With `ν = (−Df, 1)/√(1 + |Df|²)` and `x·Df = u f_u + v f_v`,
/// `dr̃(ν) = (f − u f_u − v f_v)/(r̃ √(1 + f_u² + f_v²))`. Each triangle
/// contributes one sample at its centroid.
pub fn normal_alignment_probe(solution: &ReducedSolution, shells: &[f64]) -> Result<Vec<XiBand>> {
    if shells.len() < 2 || shells.windows(2).any(|w| w[1] <= w[0]) || !(shells[0] >= 0.0) {
        return Err(Error::InvalidSpec(
            "need at least two ascending non-negative shell radii".into(),
        ));
    }
    let mesh = &solution.mesh;
    let mut bands: Vec<XiBand> = shells
        .windows(2)
        .map(|w| XiBand {
            r_inner: w[0],
            r_outer: w[1],
            inf: f64::INFINITY,
            sup: 0.0,
            samples: 0,
        })
        .collect();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let (mut u, mut v, mut f) = (0.0, 0.0, 0.0);
        for &i in tri {
            u += mesh.nodes[i][0] / 3.0;
            v += mesh.nodes[i][1] / 3.0;
            f += solution.values[i] / 3.0;
        }
        let g = mesh.triangle_gradient(&solution.values, t);
        let r = (u * u + v * v + f * f).sqrt();
        let Some(band) = bands.iter_mut().find(|b| b.r_inner <= r && r < b.r_outer) else {
            continue;
        };
        let xi = ((f - u * g[0] - v * g[1]) / (r * (1.0 + g[0] * g[0] + g[1] * g[1]).sqrt())).abs();
        band.inf = band.inf.min(xi);
        band.sup = band.sup.max(xi);
        band.samples += 1;
    }
    for b in &mut bands {
        if b.samples == 0 {
            b.inf = 0.0;
        }
    }
    Ok(bands)
}
