//! Closed-form differential geometry of immersed hypersurfaces.
//!
//! An [`Immersion`] is a chart `F: U ⊂ Rⁿ → Rⁿ⁺¹` together with its first and
//! second derivatives. From a [`Jet`] we build the [`PointFrame`] (metric,
//! unit normal, second fundamental form) and the [`ExtrinsicCalc`] record of
//! the extrinsic distance `r̃ = |F(q) − a|` to a fixed ambient point `a`.

mod domain;
mod fd;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use domain::ChartDomain;
pub use fd::FiniteDifferenceChart;

/// Relative singular-value threshold below which a chart differential is
/// treated as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Value, Jacobian and second derivatives of a chart at one parameter point.
#[derive(Debug, Clone)]
pub struct Jet {
    pub point: DVector<f64>,
    /// `(n+1) × n`, column `i` is `∂F/∂qᵢ`.
    pub jacobian: DMatrix<f64>,
    /// Row-major `n × n` table of ambient vectors `∂²F/∂qᵢ∂qⱼ`.
    pub second: Vec<DVector<f64>>,
}

impl Jet {
    pub fn dim(&self) -> usize {
        self.jacobian.ncols()
    }

    pub fn second(&self, i: usize, j: usize) -> &DVector<f64> {
        &self.second[i * self.dim() + j]
    }

    fn scale(&mut self, c: f64) {
        self.point *= c;
        self.jacobian *= c;
        for v in &mut self.second {
            *v *= c;
        }
    }
}

/// A parametrization evaluator. Implementations must be pure.
pub trait ChartMap: Send + Sync {
    fn point(&self, q: &[f64]) -> DVector<f64>;
    fn jet(&self, q: &[f64]) -> Jet;
}

/// A chart of an immersed hypersurface `F: U ⊂ Rⁿ → Rⁿ⁺¹`.
#[derive(Clone)]
pub struct Immersion {
    dim: usize,
    domain: ChartDomain,
    map: Arc<dyn ChartMap>,
    analytic: bool,
    scale: f64,
    label: String,
}

impl fmt::Debug for Immersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Immersion")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .field("analytic", &self.analytic)
            .field("scale", &self.scale)
            .finish()
    }
}

impl Immersion {
    pub fn new(
        dim: usize,
        domain: ChartDomain,
        map: Arc<dyn ChartMap>,
        analytic: bool,
        label: impl Into<String>,
    ) -> Self {
        assert_eq!(domain.dim(), dim, "chart domain dimension mismatch");
        Self {
            dim,
            domain,
            map,
            analytic,
            scale: 1.0,
            label: label.into(),
        }
    }

    /// Builds an immersion from the embedding alone; derivatives come from
    /// central differences and the result is flagged non-analytic.
    pub fn from_embedding<F>(
        dim: usize,
        domain: ChartDomain,
        label: impl Into<String>,
        f: F,
    ) -> Self
    where
        F: Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
    {
        Self::new(
            dim,
            domain,
            Arc::new(FiniteDifferenceChart::new(f)),
            false,
            label,
        )
    }

    /// The immersion `q ↦ c·F(q)` on the same chart.
    pub fn scaled(&self, c: f64) -> Self {
        assert!(c > 0.0 && c.is_finite(), "scale factor must be positive");
        let mut out = self.clone();
        out.scale *= c;
        out.label = format!("{}*{}", c, self.label);
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim + 1
    }

    pub fn domain(&self) -> &ChartDomain {
        &self.domain
    }

    pub fn is_analytic(&self) -> bool {
        self.analytic
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn point(&self, q: &[f64]) -> DVector<f64> {
        let mut p = self.map.point(q);
        if self.scale != 1.0 {
            p *= self.scale;
        }
        p
    }

    pub fn jet(&self, q: &[f64]) -> Jet {
        let mut j = self.map.jet(q);
        if self.scale != 1.0 {
            j.scale(self.scale);
        }
        j
    }

    /// Euclidean distance from `F(q)` to an ambient point.
    pub fn distance_to(&self, q: &[f64], a: &[f64]) -> f64 {
        let p = self.point(q);
        p.iter()
            .zip(a)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

/// Center of the extrinsic distance function.
///
/// Any fixed ambient point is allowed. `on_surface` records the chart
/// coordinates when the point is `F(x)` for a chart point `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasePoint {
    pub ambient_point: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub on_surface: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseConvention {
    OnSurface,
    Ambient,
}

impl BasePoint {
    pub fn ambient(point: Vec<f64>) -> Self {
        Self {
            ambient_point: point,
            on_surface: None,
        }
    }

    pub fn origin(ambient_dim: usize) -> Self {
        Self::ambient(vec![0.0; ambient_dim])
    }

    pub fn on_surface(imm: &Immersion, q: &[f64]) -> Self {
        Self {
            ambient_point: imm.point(q).iter().copied().collect(),
            on_surface: Some(q.to_vec()),
        }
    }

    pub fn convention(&self) -> BaseConvention {
        if self.on_surface.is_some() {
            BaseConvention::OnSurface
        } else {
            BaseConvention::Ambient
        }
    }

    pub(crate) fn displacement(&self, p: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            p.len(),
            p.iter().zip(&self.ambient_point).map(|(x, a)| x - a),
        )
    }
}

/// Metric, normal and second fundamental form at a chart point.
#[derive(Debug, Clone)]
pub struct PointFrame {
    pub g: DMatrix<f64>,
    pub nu: DVector<f64>,
    /// `shape[i][j] = ⟨∂ᵢ∂ⱼF, ν⟩` in the chart basis.
    pub shape: DMatrix<f64>,
    pub principal_curvatures: Vec<f64>,
    pub mean_curvature: f64,
    /// Lower Cholesky factor of `g`.
    chol: DMatrix<f64>,
    g_inv: DMatrix<f64>,
}

impl PointFrame {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `√det g`, the Riemannian volume density in chart coordinates.
    pub fn volume_density(&self) -> f64 {
        self.chol.diagonal().iter().product()
    }

    pub fn g_inv(&self) -> &DMatrix<f64> {
        &self.g_inv
    }

    pub fn cholesky_factor(&self) -> &DMatrix<f64> {
        &self.chol
    }

    /// `max |κᵢ|`.
    pub fn max_abs_curvature(&self) -> f64 {
        self.principal_curvatures
            .iter()
            .fold(0.0_f64, |m, k| m.max(k.abs()))
    }

    /// `‖A‖ = (Σ κᵢ²)^{1/2}`.
    pub fn second_form_norm(&self) -> f64 {
        self.principal_curvatures
            .iter()
            .map(|k| k * k)
            .sum::<f64>()
            .sqrt()
    }

    /// Expresses a chart-basis symmetric bilinear form in the `g`-orthonormal
    /// frame `eᵢ = Σⱼ (L⁻ᵀ)ⱼᵢ ∂ⱼ`.
    pub fn to_orthonormal(&self, form: &DMatrix<f64>) -> DMatrix<f64> {
        let l = &self.chol;
        let y = l
            .solve_lower_triangular(form)
            .expect("Cholesky factor is nonsingular");
        let z = l
            .solve_lower_triangular(&y.transpose())
            .expect("Cholesky factor is nonsingular");
        symmetrize(z.transpose())
    }

    /// `g(X, Y)` for chart-basis vectors.
    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.g * y)[(0, 0)]
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Generalized cross product of the Jacobian columns; for graphs `(q, f(q))`
/// this yields `(−Df, 1)/√(1+|Df|²)`.
fn unit_normal(jac: &DMatrix<f64>) -> DVector<f64> {
    let n = jac.ncols();
    let mut nu = DVector::zeros(n + 1);
    for k in 0..=n {
        let minor = jac.clone().remove_row(k);
        let sign = if (k + n) % 2 == 0 { 1.0 } else { -1.0 };
        nu[k] = sign * minor.determinant();
    }
    let norm = nu.norm();
    nu / norm
}

pub fn frame_from_jet(jet: &Jet, q: &[f64]) -> Result<PointFrame> {
    let n = jet.dim();
    let jac = &jet.jacobian;
    let g = symmetrize(jac.transpose() * jac);

    let eig = SymmetricEigen::new(g.clone());
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for &e in eig.eigenvalues.iter() {
        lo = lo.min(e);
        hi = hi.max(e);
    }
    let ratio = if hi > 0.0 {
        lo.max(0.0).sqrt() / hi.sqrt()
    } else {
        0.0
    };
    if !(ratio > RANK_TOLERANCE) {
        return Err(Error::RankDeficient {
            at: q.to_vec(),
            ratio,
        });
    }

    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::RankDeficient {
            at: q.to_vec(),
            ratio,
        })?
        .l();
    let g_inv = {
        let y = chol
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .unwrap();
        symmetrize(y.transpose() * y)
    };

    let nu = unit_normal(jac);
    let shape = DMatrix::from_fn(n, n, |i, j| {
        let a = jet.second(i, j).dot(&nu);
        let b = jet.second(j, i).dot(&nu);
        0.5 * (a + b)
    });

    let mut frame = PointFrame {
        g,
        nu,
        shape,
        principal_curvatures: Vec::new(),
        mean_curvature: 0.0,
        chol,
        g_inv,
    };
    let whitened = frame.to_orthonormal(&frame.shape);
    let mut kappa: Vec<f64> = SymmetricEigen::new(whitened)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    kappa.sort_by(|a, b| a.total_cmp(b));
    frame.mean_curvature = (&frame.g_inv * &frame.shape).trace() / n as f64;
    frame.principal_curvatures = kappa;
    Ok(frame)
}

/// Metric, normal, shape form and principal curvatures at `q`.
pub fn point_frame(imm: &Immersion, q: &[f64]) -> Result<PointFrame> {
    frame_from_jet(&imm.jet(q), q)
}

/// Extrinsic-distance calculus at one point.
#[derive(Debug, Clone)]
pub struct ExtrinsicCalc {
    pub r_tilde: f64,
    /// `‖∇r̃‖`, the norm of the tangential part of the ambient gradient.
    pub grad_norm: f64,
    /// `dr̃(ν) = ⟨F − a, ν⟩ / r̃`.
    pub normal_component: f64,
    pub laplacian_r: f64,
    /// `Hess h` for `h = r̃²/2`, in the `g`-orthonormal frame.
    pub hess_h: DMatrix<f64>,
    /// `Hess h` in the chart basis: `g + ⟨F − a, ν⟩·shape`.
    pub hess_h_chart: DMatrix<f64>,
    /// Chart components of `∇h = (F − a)ᵀ`; `∇r̃ = ∇h / r̃`.
    pub grad_h_chart: DVector<f64>,
    /// `⟨F − a, ν⟩`.
    pub support: f64,
}

impl ExtrinsicCalc {
    /// `tr_g Hess h = Δh`.
    pub fn laplacian_h(&self) -> f64 {
        self.hess_h.trace()
    }

    pub fn min_hess_h_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.hess_h.clone())
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, &e| m.min(e))
    }
}

pub fn calc_from_frame(jet: &Jet, frame: &PointFrame, base: &BasePoint) -> Result<ExtrinsicCalc> {
    let n = frame.dim() as f64;
    let d = base.displacement(&jet.point);
    let r = d.norm();
    if r < 1e-12 {
        return Err(Error::BaseCoincides { r });
    }
    let support = d.dot(&frame.nu);
    let jt_d = jet.jacobian.transpose() * &d;
    let grad_h_chart = frame.g_inv() * &jt_d;
    let tangential_sq = jt_d.dot(&grad_h_chart).max(0.0);
    let grad_norm = (tangential_sq.sqrt() / r).min(1.0);
    let laplacian_r = n / r - tangential_sq / (r * r * r) + n * frame.mean_curvature * support / r;
    let hess_h_chart = symmetrize(&frame.g + &frame.shape * support);
    let hess_h = frame.to_orthonormal(&hess_h_chart);
    Ok(ExtrinsicCalc {
        r_tilde: r,
        grad_norm,
        normal_component: support / r,
        laplacian_r,
        hess_h,
        hess_h_chart,
        grad_h_chart,
        support,
    })
}

/// `r̃`, `‖∇r̃‖`, `dr̃(ν)`, `Δr̃` and `Hess h` at `q` for the given center.
pub fn extrinsic_calculus(imm: &Immersion, base: &BasePoint, q: &[f64]) -> Result<ExtrinsicCalc> {
    let jet = imm.jet(q);
    let frame = frame_from_jet(&jet, q)?;
    calc_from_frame(&jet, &frame, base)
}

/// `Hess h(X, X) = g(X, X) + ⟨A(X, X), F − a⟩` for a chart-basis vector `X`.
pub fn hessian_h_quadratic(imm: &Immersion, base: &BasePoint, q: &[f64], x: &[f64]) -> Result<f64> {
    let jet = imm.jet(q);
    let frame = frame_from_jet(&jet, q)?;
    let d = base.displacement(&jet.point);
    let x = DVector::from_column_slice(x);
    let metric = frame.inner(&x, &x);
    let second = (x.transpose() * &frame.shape * &x)[(0, 0)];
    Ok(metric + second * d.dot(&frame.nu))
}

/// `Γ(k/2)` for a positive integer `k`.
fn gamma_half(k: usize) -> f64 {
    assert!(k > 0);
    let (mut value, mut x) = if k % 2 == 0 {
        (1.0, 1.0)
    } else {
        (std::f64::consts::PI.sqrt(), 0.5)
    };
    while 2.0 * x < k as f64 - 0.5 {
        value *= x;
        x += 1.0;
    }
    value
}

/// Volume `ω_n = π^{n/2} / Γ(n/2 + 1)` of the unit ball in `Rⁿ`.
pub fn unit_ball_volume(n: usize) -> f64 {
    std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half(n + 2)
}
