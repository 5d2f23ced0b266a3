//! Pohozaev-type integral identity for `h = r̃²/2` and the audit of its
//! hypotheses.
//!
//! For a domain `D` and a smooth `u`,
//!
//! ```text
//! ∫_D (‖∇u‖² − λu²)Δh − 2∫_D Hess h(∇u, ∇u) − 2∫_D (Δu + λu) g(∇h, ∇u)
//!     = ∫_∂D (‖∇u‖² − λu²) ∂h/∂n − 2∫_∂D g(∇h, ∇u) ∂u/∂n.
//! ```
//!
//! Test functions are restrictions of ambient functions `U: Rⁿ⁺¹ → R`, so
//! `∇u = (DU)ᵀ` and `Δu = tr_T D²U + ⟨DU, ν⟩·tr_g A`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{chart_grid, STRICT_MARGIN, SUP_TOL};
use crate::error::{Error, Result};
use crate::geometry::{frame_from_jet, BasePoint, Immersion};
use crate::meshing::{integrate, QuadratureOptions, Region};

/// Share of the sampled `∫φ` carried by the outer half (in `log t`) above
/// which the integral is treated as divergent.
pub const TAIL_FRACTION: f64 = 0.25;

/// Ambient test functions with closed-form derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmbientFunction {
    Constant {
        c: f64,
    },
    /// `⟨coeffs, x⟩ + offset`.
    Linear {
        coeffs: Vec<f64>,
        offset: f64,
    },
    /// `cos(⟨k, x⟩ + phase)`.
    PlaneWave {
        k: Vec<f64>,
        phase: f64,
    },
    /// `amplitude·exp(−|x − center|²/width²)`.
    Gaussian {
        center: Vec<f64>,
        width: f64,
        amplitude: f64,
    },
}

impl AmbientFunction {
    fn check_dim(&self, dim: usize) -> Result<()> {
        let got = match self {
            Self::Constant { .. } => return Ok(()),
            Self::Linear { coeffs, .. } => coeffs.len(),
            Self::PlaneWave { k, .. } => k.len(),
            Self::Gaussian { center, width, .. } => {
                if !(*width > 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "gaussian width {width} must be positive"
                    )));
                }
                center.len()
            }
        };
        if got != dim {
            return Err(Error::UnsupportedDimension { expected: dim, got });
        }
        Ok(())
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        match self {
            Self::Constant { c } => *c,
            Self::Linear { coeffs, offset } => dot(coeffs, x) + offset,
            Self::PlaneWave { k, phase } => (dot(k, x) + phase).cos(),
            Self::Gaussian {
                center,
                width,
                amplitude,
            } => amplitude * (-dist2(center, x) / (width * width)).exp(),
        }
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            Self::Constant { .. } => DVector::zeros(x.len()),
            Self::Linear { coeffs, .. } => DVector::from_column_slice(coeffs),
            Self::PlaneWave { k, phase } => {
                DVector::from_column_slice(k) * -(dot(k, x) + phase).sin()
            }
            Self::Gaussian { center, width, .. } => {
                let d = x - DVector::from_column_slice(center);
                d * (-2.0 * self.value(x) / (width * width))
            }
        }
    }

    pub fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let m = x.len();
        match self {
            Self::Constant { .. } | Self::Linear { .. } => DMatrix::zeros(m, m),
            Self::PlaneWave { k, phase } => {
                let k = DVector::from_column_slice(k);
                &k * k.transpose() * -(k.dot(x) + phase).cos()
            }
            Self::Gaussian { center, width, .. } => {
                let w2 = width * width;
                let d = x - DVector::from_column_slice(center);
                (&d * d.transpose() * (4.0 / (w2 * w2)) - DMatrix::identity(m, m) * (2.0 / w2))
                    * self.value(x)
            }
        }
    }
}

fn dot(a: &[f64], x: &DVector<f64>) -> f64 {
    a.iter().zip(x.iter()).map(|(a, b)| a * b).sum()
}

fn dist2(a: &[f64], x: &DVector<f64>) -> f64 {
    a.iter().zip(x.iter()).map(|(a, b)| (b - a) * (b - a)).sum()
}

/// Everything the identity needs at one chart point.
struct Local {
    sqrt_g: f64,
    u: f64,
    /// Chart components of `∇u`.
    grad_u: DVector<f64>,
    grad_u_sq: f64,
    lap_u: f64,
    /// Chart components of `∇h`.
    grad_h: DVector<f64>,
    /// `g(∇h, ∇u)`.
    gh_gu: f64,
    /// `Hess h(∇u, ∇u)`.
    hess_uu: f64,
    lap_h: f64,
    /// Smallest eigenvalue of `Hess h`.
    min_hess: f64,
    /// Chart Jacobian, for boundary arc length `|Jτ|`.
    jacobian: DMatrix<f64>,
}

fn local(imm: &Immersion, h_base: &BasePoint, u: &AmbientFunction, q: &[f64]) -> Result<Local> {
    let jet = imm.jet(q);
    let frame = frame_from_jet(&jet, q)?;
    let x = &jet.point;
    let j = &jet.jacobian;
    let g_inv = frame.g_inv();
    let du = u.gradient(x);
    let cov_u = j.transpose() * &du;
    let grad_u = g_inv * &cov_u;
    let tangential_hess = j.transpose() * u.hessian(x) * j;
    let mean_trace = (g_inv * &frame.shape).trace();
    let lap_u = (g_inv * tangential_hess).trace() + du.dot(&frame.nu) * mean_trace;
    let d = h_base.displacement(x);
    let cov_h = j.transpose() * &d;
    let grad_h = g_inv * &cov_h;
    let hh = &frame.g + &frame.shape * d.dot(&frame.nu);
    let hess_uu = (grad_u.transpose() * &hh * &grad_u)[(0, 0)];
    let min_hess = frame
        .to_orthonormal(&hh)
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |m, &e| m.min(e));
    Ok(Local {
        sqrt_g: frame.volume_density(),
        u: u.value(x),
        grad_u_sq: cov_u.dot(&grad_u),
        gh_gu: cov_h.dot(&grad_u),
        grad_u,
        lap_u,
        grad_h,
        hess_uu,
        lap_h: (g_inv * hh).trace(),
        min_hess,
        jacobian: j.clone(),
    })
}

/// `√g (X¹τ² − X²τ¹)`: flux density of the chart vector field `X` through a
/// boundary edge with chart tangent `τ`.
fn flux(l: &Local, x: &DVector<f64>, tau: &[f64; 2]) -> f64 {
    l.sqrt_g * (x[0] * tau[1] - x[1] * tau[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lambda: f64,
    /// `∫(‖∇u‖² − λu²)Δh`, `−2∫Hess h(∇u,∇u)`, `−2∫(Δu + λu)g(∇h,∇u)`.
    pub domain_terms: [f64; 3],
    /// `∫(‖∇u‖² − λu²)∂h/∂n`, `−2∫g(∇h,∇u)∂u/∂n`.
    pub boundary_terms: [f64; 2],
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs|`.
    pub residual: f64,
    pub truncated: bool,
    pub cells: usize,
}

/// Both sides of the identity on `region` with `h = |F − a|²/2`, `a` the
/// ambient point of `h_base`.
pub fn identity_residual(
    imm: &Immersion,
    region: &Region,
    u: &AmbientFunction,
    h_base: &BasePoint,
    lambda: f64,
    opts: &QuadratureOptions,
) -> Result<IdentityReport> {
    u.check_dim(imm.ambient_dim())?;
    // Rank-deficient points only occur on degenerate chart edges (the polar
    // origin), which carry no measure.
    let density = |q: &[f64; 2]| -> [f64; 5] {
        let Ok(l) = local(imm, h_base, u, q) else {
            return [0.0; 5];
        };
        let w = l.sqrt_g;
        [
            w * (l.grad_u_sq - lambda * l.u * l.u) * l.lap_h,
            -2.0 * w * l.hess_uu,
            -2.0 * w * (l.lap_u + lambda * l.u) * l.gh_gu,
            0.0,
            0.0,
        ]
    };
    let boundary = |q: &[f64; 2], tau: &[f64; 2]| -> [f64; 5] {
        let Ok(l) = local(imm, h_base, u, q) else {
            return [0.0; 5];
        };
        let first = &l.grad_h * (l.grad_u_sq - lambda * l.u * l.u);
        let second = &l.grad_u * (-2.0 * l.gh_gu);
        [0.0, 0.0, 0.0, flux(&l, &first, tau), flux(&l, &second, tau)]
    };
    let res = integrate(imm, region, opts, density, boundary)?;
    let d = [res.domain[0], res.domain[1], res.domain[2]];
    let b = [res.boundary[3], res.boundary[4]];
    let lhs = d.iter().sum::<f64>();
    let rhs = b.iter().sum::<f64>();
    Ok(IdentityReport {
        lambda,
        domain_terms: d,
        boundary_terms: b,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        truncated: res.truncated,
        cells: res.cells,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSequence {
    /// Indices into the sample arrays.
    pub indices: Vec<usize>,
    pub t: Vec<f64>,
    /// `t_i φ(t_i)`, strictly decreasing.
    pub t_phi: Vec<f64>,
    /// Trapezoid estimate of `∫φ` over the sampled range.
    pub integral: f64,
}

/// Greedy radii `t_0 < t_1 < …` with `t_{i+1} ≥ 2t_i` and `t_iφ(t_i)`
/// strictly decreasing, from samples of an integrable `φ ≥ 0`.
///
/// A sampled `∫φ` whose outer half (in `log t`) carries more than
/// [`TAIL_FRACTION`] of the total is reported as [`Error::NotIntegrable`].
pub fn sparse_sequence(t: &[f64], phi: &[f64]) -> Result<SparseSequence> {
    if t.len() != phi.len() || t.len() < 2 {
        return Err(Error::InvalidSpec(
            "need at least two (t, φ) samples of equal length".into(),
        ));
    }
    if !(t[0] > 0.0) || t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSpec(
            "sample radii must be positive and strictly ascending".into(),
        ));
    }
    if phi.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(Error::InvalidSpec(
            "φ must be finite and non-negative".into(),
        ));
    }
    let mid = (t[0] * t[t.len() - 1]).sqrt();
    let (mut total, mut tail) = (0.0, 0.0);
    for i in 1..t.len() {
        let piece = 0.5 * (phi[i] + phi[i - 1]) * (t[i] - t[i - 1]);
        total += piece;
        if t[i - 1] >= mid {
            tail += piece;
        } else if t[i] > mid {
            tail += piece * (t[i] - mid) / (t[i] - t[i - 1]);
        }
    }
    if !total.is_finite() || (total > 0.0 && tail > TAIL_FRACTION * total) {
        return Err(Error::NotIntegrable { integral: total });
    }
    let mut indices = vec![0];
    let mut cur = 0;
    loop {
        let cur_val = t[cur] * phi[cur];
        if cur_val == 0.0 {
            break;
        }
        let next = (cur + 1..t.len()).find(|&j| t[j] >= 2.0 * t[cur] && t[j] * phi[j] < cur_val);
        match next {
            Some(j) => {
                indices.push(j);
                cur = j;
            }
            None => break,
        }
    }
    Ok(SparseSequence {
        t: indices.iter().map(|&i| t[i]).collect(),
        t_phi: indices.iter().map(|&i| t[i] * phi[i]).collect(),
        indices,
        integral: total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianSample {
    pub chart: Vec<f64>,
    pub r_tilde: f64,
    /// Smallest eigenvalue of `Hess h`.
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallRow {
    pub r: f64,
    /// `∫_{B̃_r} Hess h(∇u, ∇u)`.
    pub hess_integral: f64,
    /// `∫_{B̃_r} ‖∇u‖²`.
    pub dirichlet: f64,
    /// `∫_{B̃_r} u²`.
    pub l2: f64,
    /// `φ(r) = ∫_{∂B̃_r} (‖∇u‖² + u²)`.
    pub phi: f64,
    /// `½[(n/2)∫∂u²/∂n − ∫(‖∇u‖² − λu²)∂h/∂n + 2∫g(∇h,∇u)∂u/∂n]` over
    /// `∂B̃_r`; equals `hess_integral` when `Δu + λu = 0`.
    pub boundary_terms: f64,
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbsenceVerdict {
    /// `Hess h ≥ 0` with a point of strict positivity: a nonzero `L²`
    /// eigenfunction would force positive `∫Hess h(∇u,∇u)` against boundary
    /// terms that vanish along the sparse sequence.
    Consistent,
    /// `Hess h` has a negative eigenvalue somewhere on the sampled chart.
    HypothesisFails,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsenceConfig {
    pub lambda: f64,
    /// Ascending extrinsic radii of the balls.
    pub radii: Vec<f64>,
    /// Chart grid points per axis for the `Hess h` sign audit.
    pub per_axis: usize,
    pub level: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsenceReport {
    pub lambda: f64,
    pub min_hess_h: f64,
    /// Sample attaining `min_hess_h`.
    pub min_witness: HessianSample,
    /// Sample with the largest smallest eigenvalue, when that exceeds
    /// [`STRICT_MARGIN`].
    pub strict_witness: Option<HessianSample>,
    pub rows: Vec<BallRow>,
    /// `None` when the sampled `φ` looks non-integrable.
    pub sparse: Option<SparseSequence>,
    pub verdict: AbsenceVerdict,
}

fn ball_row(
    imm: &Immersion,
    base: &BasePoint,
    u: &AmbientFunction,
    lambda: f64,
    r: f64,
    level: u32,
) -> Result<BallRow> {
    let n = imm.dim() as f64;
    let density = |q: &[f64; 2]| -> [f64; 6] {
        let Ok(l) = local(imm, base, u, q) else {
            return [0.0; 6];
        };
        let w = l.sqrt_g;
        [w * l.hess_uu, w * l.grad_u_sq, w * l.u * l.u, 0.0, 0.0, 0.0]
    };
    let boundary = |q: &[f64; 2], tau: &[f64; 2]| -> [f64; 6] {
        let Ok(l) = local(imm, base, u, q) else {
            return [0.0; 6];
        };
        let tq = DVector::from_column_slice(tau);
        let arc = (&l.jacobian * tq).norm();
        let du2 = &l.grad_u * (2.0 * l.u);
        let energy = &l.grad_h * (l.grad_u_sq - lambda * l.u * l.u);
        let cross = &l.grad_u * l.gh_gu;
        [
            0.0,
            0.0,
            (l.grad_u_sq + l.u * l.u) * arc,
            flux(&l, &du2, tau),
            flux(&l, &energy, tau),
            flux(&l, &cross, tau),
        ]
    };
    let region = Region::Ball {
        base: base.clone(),
        radius: r,
    };
    let res = integrate(
        imm,
        &region,
        &QuadratureOptions::adaptive(level),
        density,
        boundary,
    )?;
    let [hess, dirichlet, l2, ..] = res.domain;
    let [_, _, phi, du2, energy, cross] = res.boundary;
    Ok(BallRow {
        r,
        hess_integral: hess,
        dirichlet,
        l2,
        phi,
        boundary_terms: 0.5 * (0.5 * n * du2 - energy + 2.0 * cross),
        truncated: res.truncated,
    })
}

/// Audits the hypotheses behind the absence of `L²` eigenfunctions for a
/// candidate `u` on extrinsic balls about `base`.
pub fn absence_audit(
    imm: &Immersion,
    base: &BasePoint,
    u: &AmbientFunction,
    cfg: &AbsenceConfig,
) -> Result<AbsenceReport> {
    u.check_dim(imm.ambient_dim())?;
    if cfg.radii.len() < 2 || !(cfg.radii[0] > 0.0) || cfg.radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSpec(
            "need at least two positive ascending radii".into(),
        ));
    }
    if cfg.per_axis < 2 {
        return Err(Error::InvalidSpec(
            "sign audit needs at least two grid points per axis".into(),
        ));
    }
    let (grid, _) = chart_grid(imm.domain(), None, cfg.per_axis);
    let samples: Vec<HessianSample> = grid
        .par_iter()
        .filter_map(|q| {
            let l = local(imm, base, u, q).ok()?;
            let r_tilde = imm.distance_to(q, &base.ambient_point);
            Some(HessianSample {
                chart: q.clone(),
                r_tilde,
                min_eigenvalue: l.min_hess,
            })
        })
        .collect();
    let min_witness = samples
        .iter()
        .min_by(|a, b| a.min_eigenvalue.total_cmp(&b.min_eigenvalue))
        .cloned()
        .ok_or_else(|| Error::InvalidSpec("no regular chart samples".into()))?;
    let strict_witness = samples
        .iter()
        .max_by(|a, b| a.min_eigenvalue.total_cmp(&b.min_eigenvalue))
        .filter(|s| s.min_eigenvalue > STRICT_MARGIN)
        .cloned();

    let rows: Vec<BallRow> = cfg
        .radii
        .par_iter()
        .map(|&r| ball_row(imm, base, u, cfg.lambda, r, cfg.level))
        .collect::<Result<_>>()?;
    let ts: Vec<f64> = rows.iter().map(|r| r.r).collect();
    let phis: Vec<f64> = rows.iter().map(|r| r.phi).collect();
    let sparse = match sparse_sequence(&ts, &phis) {
        Ok(s) => Some(s),
        Err(Error::NotIntegrable { .. }) => None,
        Err(e) => return Err(e),
    };
    let verdict = if min_witness.min_eigenvalue >= -SUP_TOL && strict_witness.is_some() {
        AbsenceVerdict::Consistent
    } else {
        AbsenceVerdict::HypothesisFails
    };
    Ok(AbsenceReport {
        lambda: cfg.lambda,
        min_hess_h: min_witness.min_eigenvalue,
        min_witness,
        strict_witness,
        rows,
        sparse,
        verdict,
    })
}
