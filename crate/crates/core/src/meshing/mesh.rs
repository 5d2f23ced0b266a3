use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{point_frame, BasePoint, ChartDomain, Immersion};

pub const MIN_TRIANGLE_AREA: f64 = 1e-14;

/// Triangulated truncated surface (intrinsic dimension 2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriMesh {
    pub chart: Vec<[f64; 2]>,
    pub points: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
    /// Per-vertex extrinsic distance to the base used to build the mesh.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_tilde: Option<Vec<f64>>,
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(a: &[f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

impl TriMesh {
    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.iter().filter(|b| **b).count()
    }

    /// Unnormalized embedded normal `(p₁ − p₀) × (p₂ − p₀)`.
    pub fn triangle_normal(&self, t: usize) -> [f64; 3] {
        let [a, b, c] = self.triangles[t];
        let p = &self.points;
        cross(&sub(&p[b], &p[a]), &sub(&p[c], &p[a]))
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        0.5 * norm3(&self.triangle_normal(t))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|tri| {
                (0..3)
                    .map(move |k| norm3(&sub(&self.points[tri[k]], &self.points[tri[(k + 1) % 3]])))
            })
            .fold(0.0, f64::max)
    }

    /// Fails if any triangle collapses or is inverted relative to the surface
    /// normal at its first vertex.
    fn validate(&self, imm: &Immersion) -> Result<()> {
        for t in 0..self.triangles.len() {
            let area = self.triangle_area(t);
            if !(area > MIN_TRIANGLE_AREA) {
                return Err(Error::DegenerateChart(format!(
                    "triangle {t} has embedded area {area:e}"
                )));
            }
            let q = self.chart[self.triangles[t][0]];
            let nu = point_frame(imm, &q)?.nu;
            let nrm = self.triangle_normal(t);
            let d = nrm[0] * nu[0] + nrm[1] * nu[1] + nrm[2] * nu[2];
            if d <= 0.0 {
                return Err(Error::DegenerateChart(format!("triangle {t} is inverted")));
            }
        }
        Ok(())
    }

    fn from_chart(
        imm: &Immersion,
        chart: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<bool>,
    ) -> Result<Self> {
        let points = chart
            .iter()
            .map(|q| {
                let p = imm.point(q);
                [p[0], p[1], p[2]]
            })
            .collect();
        let mesh = Self {
            chart,
            points,
            triangles,
            boundary,
            r_tilde: None,
        };
        mesh.validate(imm)?;
        Ok(mesh)
    }
}

/// Connects two concentric rings of `a` and `b` vertices (indices offset by
/// `ia` and `ib`), both starting at angle zero and ordered counterclockwise.
fn zip_rings(ia: usize, a: usize, ib: usize, b: usize, tris: &mut Vec<[usize; 3]>) {
    let (mut i, mut j) = (0usize, 0usize);
    while i < a || j < b {
        let next_outer = (j + 1) as f64 / b as f64;
        let next_inner = (i + 1) as f64 / a as f64;
        if j < b && (i == a || next_outer <= next_inner) {
            tris.push([ia + i % a, ib + j % b, ib + (j + 1) % b]);
            j += 1;
        } else {
            tris.push([ia + i % a, ib + j % b, ia + (i + 1) % a]);
            i += 1;
        }
    }
}

/// Polar disk scheme: a center vertex and rings `k = 1..=res` of `4k`
/// vertices. `radius(φ)` gives the outer radius in direction `φ`.
fn polar_disk(
    center: [f64; 2],
    res: usize,
    mut radius: impl FnMut(f64) -> f64,
) -> (Vec<[f64; 2]>, Vec<[usize; 3]>, Vec<bool>) {
    let mut chart = vec![center];
    let mut boundary = vec![false];
    let mut tris = Vec::new();
    let mut ring_start = vec![0usize];
    for k in 1..=res {
        ring_start.push(chart.len());
        let count = 4 * k;
        for j in 0..count {
            let phi = 2.0 * PI * j as f64 / count as f64;
            let rho = radius(phi) * k as f64 / res as f64;
            chart.push([center[0] + rho * phi.cos(), center[1] + rho * phi.sin()]);
            boundary.push(k == res);
        }
    }
    for j in 0..4 {
        tris.push([0, 1 + j, 1 + (j + 1) % 4]);
    }
    for k in 2..=res {
        zip_rings(
            ring_start[k - 1],
            4 * (k - 1),
            ring_start[k],
            4 * k,
            &mut tris,
        );
    }
    (chart, tris, boundary)
}

/// Structured triangulation of the chart domain.
pub fn triangulate(imm: &Immersion, resolution: usize) -> Result<TriMesh> {
    if imm.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            expected: 2,
            got: imm.dim(),
        });
    }
    if resolution < 2 {
        return Err(Error::InvalidSpec(format!(
            "mesh resolution must be >= 2, got {resolution}"
        )));
    }
    match imm.domain() {
        ChartDomain::Disk { center, radius } => {
            let (chart, tris, boundary) =
                polar_disk([center[0], center[1]], resolution, |_| *radius);
            TriMesh::from_chart(imm, chart, tris, boundary)
        }
        ChartDomain::Rectangle { lo, hi, periodic } => {
            let (chart, tris, boundary) = rectangle_grid(
                [lo[0], lo[1]],
                [hi[0], hi[1]],
                [periodic[0], periodic[1]],
                [resolution, resolution],
            );
            TriMesh::from_chart(imm, chart, tris, boundary)
        }
    }
}

fn rectangle_grid(
    lo: [f64; 2],
    hi: [f64; 2],
    periodic: [bool; 2],
    res: [usize; 2],
) -> (Vec<[f64; 2]>, Vec<[usize; 3]>, Vec<bool>) {
    let cols = [
        if periodic[0] { res[0] } else { res[0] + 1 },
        if periodic[1] { res[1] } else { res[1] + 1 },
    ];
    let mut chart = Vec::with_capacity(cols[0] * cols[1]);
    let mut boundary = Vec::with_capacity(cols[0] * cols[1]);
    for j in 0..cols[1] {
        for i in 0..cols[0] {
            let x = lo[0] + (hi[0] - lo[0]) * i as f64 / res[0] as f64;
            let y = lo[1] + (hi[1] - lo[1]) * j as f64 / res[1] as f64;
            chart.push([x, y]);
            let on_x = !periodic[0] && (i == 0 || i == res[0]);
            let on_y = !periodic[1] && (j == 0 || j == res[1]);
            boundary.push(on_x || on_y);
        }
    }
    let idx = |i: usize, j: usize| (j % cols[1]) * cols[0] + (i % cols[0]);
    let mut tris = Vec::with_capacity(2 * res[0] * res[1]);
    for j in 0..res[1] {
        for i in 0..res[0] {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    (chart, tris, boundary)
}

/// Golden-section minimization of `f` on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    const G: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - G * (b - a);
    let mut x2 = a + G * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - G * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + G * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Root of `g` on `[a, b]` with `g(a) < 0 ≤ g(b)`.
fn bisect(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if g(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Mesh of the extrinsic ball `{r̃ ≤ r}` whose boundary vertices lie on the
/// sphere `{r̃ = r}` (Dirichlet boundary).
///
/// When the chart has a periodic axis and the ball contains every coordinate
/// loop, the preimage is a band and is meshed column by column. Otherwise it
/// is meshed as a star-shaped region around the chart point closest to the
/// base.
pub fn ball_mesh(imm: &Immersion, base: &BasePoint, r: f64, resolution: usize) -> Result<TriMesh> {
    if imm.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            expected: 2,
            got: imm.dim(),
        });
    }
    if resolution < 2 || !(r > 0.0) {
        return Err(Error::InvalidSpec(
            "ball mesh needs resolution >= 2 and r > 0".into(),
        ));
    }
    let a = base.ambient_point.clone();
    let dist = |q: &[f64]| imm.distance_to(q, &a);
    let (lo, hi) = imm.domain().bounds();

    let periodic_axis = (0..2).find(|&k| imm.domain().is_periodic(k));
    let mut mesh = match periodic_axis {
        Some(p) => match band_mesh(imm, &dist, r, resolution, p, &lo, &hi)? {
            Some(m) => m,
            None => star_mesh(imm, base, &dist, r, resolution, &lo, &hi)?,
        },
        None => star_mesh(imm, base, &dist, r, resolution, &lo, &hi)?,
    };
    mesh.r_tilde = Some(mesh.chart.iter().map(|q| dist(q)).collect());
    Ok(mesh)
}

fn band_mesh(
    imm: &Immersion,
    dist: &impl Fn(&[f64]) -> f64,
    r: f64,
    res: usize,
    periodic: usize,
    lo: &[f64],
    hi: &[f64],
) -> Result<Option<TriMesh>> {
    let free = 1 - periodic;
    let columns = 4 * res;
    let period = hi[periodic] - lo[periodic];
    let at = |s: f64, phi: f64| {
        let mut q = [0.0; 2];
        q[free] = s;
        q[periodic] = phi;
        q
    };
    let mut intervals = Vec::with_capacity(columns);
    for j in 0..columns {
        let phi = lo[periodic] + period * j as f64 / columns as f64;
        let f = |s: f64| dist(&at(s, phi));
        // Coarse scan then golden refinement for the closest point on the column.
        let samples = 256;
        let mut best = (f64::INFINITY, lo[free]);
        for i in 0..=samples {
            let s = lo[free] + (hi[free] - lo[free]) * i as f64 / samples as f64;
            let v = f(s);
            if v < best.0 {
                best = (v, s);
            }
        }
        let h = (hi[free] - lo[free]) / samples as f64;
        let s_min = golden_min(
            f,
            (best.1 - h).max(lo[free]),
            (best.1 + h).min(hi[free]),
            80,
        );
        if f(s_min) >= r {
            return Ok(None);
        }
        if f(lo[free]) <= r || f(hi[free]) <= r {
            return Err(Error::TruncationTooSmall { radius: r });
        }
        let g = |s: f64| r - f(s);
        let s_lo = bisect(g, lo[free], s_min);
        let s_hi = bisect(|s| -g(s), s_min, hi[free]);
        intervals.push((s_lo, s_hi));
    }
    let dphi = period / columns as f64;
    let mean_len = intervals.iter().map(|(a, b)| b - a).sum::<f64>() / columns as f64;
    let rows = ((mean_len / dphi).round() as usize).max(2);

    let mut chart = Vec::with_capacity(columns * (rows + 1));
    let mut boundary = Vec::with_capacity(columns * (rows + 1));
    for j in 0..columns {
        let phi = lo[periodic] + dphi * j as f64;
        let (s0, s1) = intervals[j];
        for i in 0..=rows {
            let s = s0 + (s1 - s0) * i as f64 / rows as f64;
            chart.push(at(s, phi));
            boundary.push(i == 0 || i == rows);
        }
    }
    let idx = |i: usize, j: usize| (j % columns) * (rows + 1) + i;
    let mut tris = Vec::with_capacity(2 * columns * rows);
    for j in 0..columns {
        for i in 0..rows {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            // Keep counterclockwise order in the (free, periodic) frame.
            if free == 0 {
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            } else {
                tris.push([a, c, b]);
                tris.push([a, d, c]);
            }
        }
    }
    TriMesh::from_chart(imm, chart, tris, boundary).map(Some)
}

fn star_mesh(
    imm: &Immersion,
    base: &BasePoint,
    dist: &impl Fn(&[f64]) -> f64,
    r: f64,
    res: usize,
    lo: &[f64],
    hi: &[f64],
) -> Result<TriMesh> {
    let center = match &base.on_surface {
        Some(q) => [q[0], q[1]],
        None => closest_chart_point(dist, lo, hi),
    };
    if dist(&center) >= r {
        return Err(Error::InvalidSpec(format!(
            "extrinsic ball of radius {r} misses the surface"
        )));
    }
    let domain = imm.domain();
    let reach = (0..2).map(|k| hi[k] - lo[k]).fold(0.0, f64::max);
    let ray = |phi: f64| -> Result<f64> {
        let dir = [phi.cos(), phi.sin()];
        let point = |s: f64| [center[0] + s * dir[0], center[1] + s * dir[1]];
        // March outward until the ray leaves the ball, then bisect.
        let mut step = reach / 4096.0;
        let mut s_in = 0.0;
        loop {
            let s = s_in + step;
            let q = point(s);
            let inside_chart = (0..2)
                .all(|k| domain.is_periodic(k) || (q[k] >= lo[k] && q[k] <= hi[k]))
                && domain.contains(&q);
            if !inside_chart {
                return Err(Error::TruncationTooSmall { radius: r });
            }
            if dist(&q) > r {
                return Ok(bisect(|t| dist(&point(t)) - r, s_in, s));
            }
            s_in = s;
            step *= 1.25;
        }
    };
    let mut radii = std::collections::HashMap::new();
    let mut err = None;
    let (chart, tris, boundary) = polar_disk(center, res, |phi| {
        let key = phi.to_bits();
        *radii.entry(key).or_insert_with(|| match ray(phi) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        })
    });
    if let Some(e) = err {
        return Err(e);
    }
    TriMesh::from_chart(imm, chart, tris, boundary)
}

/// Chart point minimizing `dist` over the bounding box: coarse grid search
/// followed by coordinate-wise golden refinement.
pub(crate) fn closest_chart_point(
    dist: &impl Fn(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
) -> [f64; 2] {
    let grid = 64;
    let mut best = (f64::INFINITY, [0.0; 2]);
    for i in 0..=grid {
        for j in 0..=grid {
            let q = [
                lo[0] + (hi[0] - lo[0]) * i as f64 / grid as f64,
                lo[1] + (hi[1] - lo[1]) * j as f64 / grid as f64,
            ];
            let v = dist(&q);
            if v < best.0 {
                best = (v, q);
            }
        }
    }
    let mut q = best.1;
    let mut half = [(hi[0] - lo[0]) / grid as f64, (hi[1] - lo[1]) / grid as f64];
    for _ in 0..40 {
        for k in 0..2 {
            let f = |s: f64| {
                let mut p = q;
                p[k] = s;
                dist(&p)
            };
            q[k] = golden_min(
                f,
                (q[k] - half[k]).max(lo[k]),
                (q[k] + half[k]).min(hi[k]),
                60,
            );
        }
        half = [half[0] * 0.5, half[1] * 0.5];
    }
    q
}
