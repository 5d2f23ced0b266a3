//! Damped Newton for the reduced minimal surface equation
//! `div((uv)^{m−1} ∇f/√(1 + |∇f|²)) = 0` on the quarter disk, in P1 form:
//! minimize `Σ_T w_T √(1 + |∇f_T|²)` with `w_T = ∫_T (uv)^{m−1}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, EnvelopeCholesky};

use super::{f1_uv, f2_uv, BdggParams, Profile};

/// Relative slack `|f₁| ≤ |f| + BARRIER_TOL·(1 + |f|)` in the soft ordering check.
const BARRIER_TOL: f64 = 1e-3;
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Radial rings; the angular sector count is the next even number.
    pub resolution: usize,
    /// Newton stops when the residual norm drops by this factor.
    pub tol: f64,
    pub max_iters: usize,
    /// Radius `h` of the gradient report; `R/4` when unset.
    pub gradient_radius: Option<f64>,
    /// Evaluate `f₂` for the barrier and gradient reports.
    pub barriers: bool,
}

impl SolverOptions {
    pub fn new(resolution: usize) -> Self {
        Self {
            resolution,
            tol: 1e-12,
            max_iters: 100,
            gradient_radius: None,
            barriers: true,
        }
    }
}

/// Polar mesh of `{u, v ≥ 0, u² + v² ≤ R²}`, symmetric under `(u, v) ↦ (v, u)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuarterDiskMesh {
    pub radius: f64,
    pub rings: usize,
    pub sectors: usize,
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub on_arc: Vec<bool>,
    /// Index of the reflected node.
    pub mirror: Vec<usize>,
}

impl QuarterDiskMesh {
    pub fn new(radius: f64, resolution: usize) -> Result<Self> {
        if !(radius > 0.0) || resolution < 2 {
            return Err(Error::InvalidSpec(format!(
                "quarter disk needs R > 0 and at least 2 rings (got R = {radius}, {resolution})"
            )));
        }
        let rings = resolution;
        let sectors = resolution + resolution % 2;
        let idx = |i: usize, j: usize| {
            if i == 0 {
                0
            } else {
                1 + (i - 1) * (sectors + 1) + j
            }
        };
        let mut nodes = vec![[0.0, 0.0]];
        let mut on_arc = vec![false];
        let mut mirror = vec![0];
        for i in 1..=rings {
            let r = radius * i as f64 / rings as f64;
            let start = nodes.len();
            for j in 0..=sectors {
                let p = if 2 * j < sectors {
                    let th = std::f64::consts::FRAC_PI_2 * j as f64 / sectors as f64;
                    [r * th.cos(), r * th.sin()]
                } else if 2 * j == sectors {
                    let s = r * std::f64::consts::FRAC_1_SQRT_2;
                    [s, s]
                } else {
                    let q = nodes[start + sectors - j];
                    [q[1], q[0]]
                };
                nodes.push(p);
                on_arc.push(i == rings);
                mirror.push(idx(i, sectors - j));
            }
        }
        let mut triangles = Vec::new();
        for j in 0..sectors {
            triangles.push([0, idx(1, j), idx(1, j + 1)]);
        }
        for i in 1..rings {
            for j in 0..sectors {
                let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
                if 2 * j < sectors {
                    triangles.push([a, b, c]);
                    triangles.push([a, c, d]);
                } else {
                    triangles.push([a, b, d]);
                    triangles.push([b, c, d]);
                }
            }
        }
        Ok(Self {
            radius,
            rings,
            sectors,
            nodes,
            triangles,
            on_arc,
            mirror,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// P1 basis gradients and the triangle area.
    fn gradients(&self, t: usize) -> ([[f64; 2]; 3], f64) {
        let [p0, p1, p2] = self.triangles[t].map(|k| self.nodes[k]);
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let g = [
            [(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det],
            [(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det],
            [(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det],
        ];
        (g, 0.5 * det.abs())
    }

    /// Gradient of the P1 interpolant of `values` on triangle `t`.
    pub fn triangle_gradient(&self, values: &[f64], t: usize) -> [f64; 2] {
        let (g, _) = self.gradients(t);
        let tri = self.triangles[t];
        let mut out = [0.0; 2];
        for k in 0..3 {
            out[0] += values[tri[k]] * g[k][0];
            out[1] += values[tri[k]] * g[k][1];
        }
        out
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
                }
                let p = p1;
                dp = n as f64 * (x * p - p0) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            (0.5 * (1.0 - x), 0.5 * w)
        })
        .collect()
}

/// `∫_T (uv)^k` by a collapsed Gauss rule, exact for this polynomial degree.
fn orbit_weight(p: [[f64; 2]; 3], k: i32, rule: &[(f64, f64)]) -> f64 {
    let det = ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
        - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
        .abs();
    let mut sum = 0.0;
    for &(s, ws) in rule {
        for &(t, wt) in rule {
            let b = [1.0 - s, s * (1.0 - t), s * t];
            let u = b[0] * p[0][0] + b[1] * p[1][0] + b[2] * p[2][0];
            let v = b[0] * p[0][1] + b[1] * p[1][1] + b[2] * p[2][1];
            sum += ws * wt * s * (u * v).powi(k);
        }
    }
    sum * det
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierReport {
    /// Interior nodes compared (off the arc and the origin).
    pub checked: usize,
    /// Nodes with `|f₁| > |f| + slack`.
    pub lower_violations: usize,
    /// Nodes with `|f| > |f₂| + slack`.
    pub upper_violations: usize,
    pub max_lower_excess: f64,
    pub max_upper_excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientReport {
    pub h: f64,
    /// `max |Df|` over triangles inside `B_h`.
    pub max_gradient: f64,
    /// `sup_{B_{2h}} |f₂| / (2h)`, the argument of the exponential estimate.
    pub f2_argument: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedSolution {
    pub params: BdggParams,
    #[serde(skip)]
    pub mesh: QuarterDiskMesh,
    #[serde(skip)]
    pub values: Vec<f64>,
    pub radius: f64,
    pub nodes: usize,
    /// Arc data; `"f1"` for the solver, a label for interpolated controls.
    pub boundary_data: String,
    pub iterations: usize,
    pub initial_residual: f64,
    pub residual_norm: f64,
    pub energy: f64,
    /// `max |f(u,v) + f(v,u)|` over mirror node pairs.
    pub antisymmetry: f64,
    /// `max |f|` on the diagonal `u = v`.
    pub diagonal_max: f64,
    pub barrier: Option<BarrierReport>,
    pub gradient: Option<GradientReport>,
}

impl ReducedSolution {
    /// Interpolates `f` on the mesh without solving; used for controls.
    pub fn interpolate(
        params: &BdggParams,
        radius: f64,
        resolution: usize,
        label: &str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mesh = QuarterDiskMesh::new(radius, resolution)?;
        let values: Vec<f64> = mesh.nodes.iter().map(|p| f(p[0], p[1])).collect();
        let problem = Problem::new(params, &mesh);
        let (residual, energy) = {
            let (r, _) = problem.gradient(&values);
            (norm(&r), problem.energy(&values))
        };
        Ok(Self::finish(
            params, mesh, values, label, 0, residual, residual, energy,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        params: &BdggParams,
        mesh: QuarterDiskMesh,
        values: Vec<f64>,
        label: &str,
        iterations: usize,
        initial_residual: f64,
        residual_norm: f64,
        energy: f64,
    ) -> Self {
        let antisymmetry = mesh
            .mirror
            .iter()
            .enumerate()
            .map(|(i, &j)| (values[i] + values[j]).abs())
            .fold(0.0, f64::max);
        let diagonal_max = mesh
            .mirror
            .iter()
            .enumerate()
            .filter(|&(i, &j)| i == j)
            .map(|(i, _)| values[i].abs())
            .fold(0.0, f64::max);
        Self {
            params: params.clone(),
            radius: mesh.radius,
            nodes: mesh.node_count(),
            mesh,
            values,
            boundary_data: label.to_string(),
            iterations,
            initial_residual,
            residual_norm,
            energy,
            antisymmetry,
            diagonal_max,
            barrier: None,
            gradient: None,
        }
    }

    /// `(u, v, f)` rows for CSV export.
    pub fn rows(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.mesh
            .nodes
            .iter()
            .zip(&self.values)
            .map(|(p, f)| [p[0], p[1], *f])
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct Problem<'a> {
    mesh: &'a QuarterDiskMesh,
    weights: Vec<f64>,
    grads: Vec<[[f64; 2]; 3]>,
    /// Unknown index of each node, `None` on the arc.
    free: Vec<Option<usize>>,
    n_free: usize,
}

impl<'a> Problem<'a> {
    fn new(params: &BdggParams, mesh: &'a QuarterDiskMesh) -> Self {
        let k = params.m as i32 - 1;
        let rule = gauss_legendre(params.m + 1);
        let (grads, weights): (Vec<_>, Vec<_>) = (0..mesh.triangles.len())
            .map(|t| {
                let (g, _) = mesh.gradients(t);
                let p = mesh.triangles[t].map(|i| mesh.nodes[i]);
                (g, orbit_weight(p, k, &rule))
            })
            .unzip();
        let mut n_free = 0;
        let free = mesh
            .on_arc
            .iter()
            .map(|&arc| {
                (!arc).then(|| {
                    n_free += 1;
                    n_free - 1
                })
            })
            .collect();
        Self {
            mesh,
            weights,
            grads,
            free,
            n_free,
        }
    }

    fn slope(&self, f: &[f64], t: usize) -> [f64; 2] {
        let tri = self.mesh.triangles[t];
        let g = &self.grads[t];
        let mut out = [0.0; 2];
        for k in 0..3 {
            out[0] += f[tri[k]] * g[k][0];
            out[1] += f[tri[k]] * g[k][1];
        }
        out
    }

    fn energy(&self, f: &[f64]) -> f64 {
        (0..self.weights.len())
            .map(|t| {
                let s = self.slope(f, t);
                self.weights[t] * (1.0 + s[0] * s[0] + s[1] * s[1]).sqrt()
            })
            .sum()
    }

    /// Energy gradient on the free nodes and the per-triangle slopes.
    fn gradient(&self, f: &[f64]) -> (Vec<f64>, Vec<[f64; 2]>) {
        let mut r = vec![0.0; self.n_free];
        let mut slopes = Vec::with_capacity(self.weights.len());
        for t in 0..self.weights.len() {
            let s = self.slope(f, t);
            let q = (1.0 + s[0] * s[0] + s[1] * s[1]).sqrt();
            let tri = self.mesh.triangles[t];
            for k in 0..3 {
                if let Some(i) = self.free[tri[k]] {
                    let gk = self.grads[t][k];
                    r[i] += self.weights[t] * (gk[0] * s[0] + gk[1] * s[1]) / q;
                }
            }
            slopes.push(s);
        }
        (r, slopes)
    }

    fn hessian(&self, slopes: &[[f64; 2]]) -> CsrMatrix {
        let mut trip = Vec::with_capacity(9 * slopes.len());
        for (t, s) in slopes.iter().enumerate() {
            let q2 = 1.0 + s[0] * s[0] + s[1] * s[1];
            let q = q2.sqrt();
            let w = self.weights[t];
            let tri = self.mesh.triangles[t];
            let g = &self.grads[t];
            for a in 0..3 {
                let Some(i) = self.free[tri[a]] else { continue };
                let ga = g[a][0] * s[0] + g[a][1] * s[1];
                for b in 0..3 {
                    let Some(j) = self.free[tri[b]] else { continue };
                    let gb = g[b][0] * s[0] + g[b][1] * s[1];
                    let dot = g[a][0] * g[b][0] + g[a][1] * g[b][1];
                    trip.push((i, j, w * (dot / q - ga * gb / (q2 * q))));
                }
            }
        }
        CsrMatrix::from_triplets(self.n_free, self.n_free, &trip)
    }
}

/// Solves the reduced Dirichlet problem with `f = f₁` on the arc, starting
/// from `f₁`, and attaches the barrier and gradient reports.
pub fn solve_reduced_mse(
    params: &BdggParams,
    radius: f64,
    opts: &SolverOptions,
) -> Result<ReducedSolution> {
    params.require_valid()?;
    let mesh = QuarterDiskMesh::new(radius, opts.resolution)?;
    let problem = Problem::new(params, &mesh);
    let mut f: Vec<f64> = mesh
        .nodes
        .iter()
        .map(|p| f1_uv(params, p[0], p[1]))
        .collect::<Result<_>>()?;

    let (mut r, mut slopes) = problem.gradient(&f);
    let r0 = norm(&r);
    let mut res = r0;
    let mut iterations = 0;
    while res > opts.tol * r0.max(f64::MIN_POSITIVE) {
        if iterations == opts.max_iters {
            return Err(Error::NewtonDiverged {
                iterations,
                residual: res,
            });
        }
        iterations += 1;
        let chol = EnvelopeCholesky::factor(&problem.hessian(&slopes))?;
        let step = chol.solve(&r);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let mut trial = f.clone();
            for (node, idx) in problem.free.iter().enumerate() {
                if let Some(i) = *idx {
                    trial[node] -= t * step[i];
                }
            }
            let (tr, ts) = problem.gradient(&trial);
            let tres = norm(&tr);
            if tres < res {
                accepted = Some((trial, tr, ts, tres));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((nf, nr, ns, nres)) => {
                f = nf;
                r = nr;
                slopes = ns;
                res = nres;
            }
            // No decrease along a full Newton direction: round-off floor.
            None if res <= 1e3 * opts.tol * r0 => break,
            None => {
                return Err(Error::NewtonDiverged {
                    iterations,
                    residual: res,
                })
            }
        }
    }
    let energy = problem.energy(&f);
    let mut sol = ReducedSolution::finish(params, mesh, f, "f1", iterations, r0, res, energy);
    if opts.barriers {
        let profile = Profile::new(params)?;
        let h = opts.gradient_radius.unwrap_or(0.25 * radius);
        sol.barrier = Some(barrier_report(&sol, &profile)?);
        sol.gradient = Some(gradient_report(&sol, &profile, h)?);
    }
    Ok(sol)
}

fn barrier_report(sol: &ReducedSolution, profile: &Profile) -> Result<BarrierReport> {
    let params = profile.params();
    let rows: Vec<(f64, f64)> = sol
        .mesh
        .nodes
        .par_iter()
        .zip(&sol.values)
        .enumerate()
        .filter(|(i, _)| *i != 0 && !sol.mesh.on_arc[*i])
        .map(|(_, (p, &f))| {
            let lower = f1_uv(params, p[0], p[1])?.abs() - f.abs() - BARRIER_TOL * (1.0 + f.abs());
            let upper = f.abs() - f2_uv(profile, p[0], p[1])?.abs() - BARRIER_TOL * (1.0 + f.abs());
            Ok((lower, upper))
        })
        .collect::<Result<_>>()?;
    Ok(BarrierReport {
        checked: rows.len(),
        lower_violations: rows.iter().filter(|r| r.0 > 0.0).count(),
        upper_violations: rows.iter().filter(|r| r.1 > 0.0).count(),
        max_lower_excess: rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max),
        max_upper_excess: rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max),
    })
}

fn gradient_report(sol: &ReducedSolution, profile: &Profile, h: f64) -> Result<GradientReport> {
    if !(h > 0.0 && 2.0 * h <= sol.radius) {
        return Err(Error::InvalidSpec(format!(
            "gradient radius h = {h} needs 0 < 2h ≤ R = {}",
            sol.radius
        )));
    }
    let mesh = &sol.mesh;
    let inside = |i: usize, r: f64| {
        let p = mesh.nodes[i];
        p[0].hypot(p[1]) <= r * (1.0 + 1e-12)
    };
    let max_gradient = (0..mesh.triangles.len())
        .filter(|&t| mesh.triangles[t].iter().all(|&i| inside(i, h)))
        .map(|t| {
            let g = mesh.triangle_gradient(&sol.values, t);
            g[0].hypot(g[1])
        })
        .fold(0.0, f64::max);
    let sup_f2 = (0..mesh.node_count())
        .into_par_iter()
        .filter(|&i| inside(i, 2.0 * h))
        .map(|i| f2_uv(profile, mesh.nodes[i][0], mesh.nodes[i][1]).map(f64::abs))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(GradientReport {
        h,
        max_gradient,
        f2_argument: sup_f2 / (2.0 * h),
    })
}
