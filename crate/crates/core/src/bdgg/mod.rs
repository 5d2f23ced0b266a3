//! Bombieri–De Giorgi–Giusti barriers and the symmetry-reduced Dirichlet
//! problem for the minimal surface equation over `R^{2m}`.
//!
//! With `u = |(x₁,…,x_m)|` and `v = |(x_{m+1},…,x_{2m})|` the barriers are
//! `f₁ = (u² − v²)(u² + v²)^{α−1}` and
//! `f₂ = P((u² − v²) + f₁[1 + D|(u² − v²)/(u² + v²)|^{λ−1}])`.

mod probe;
mod profile;
mod solver;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use probe::normal_alignment_probe;
pub use profile::{gk15_adaptive, Profile, INNER_TOL, OUTER_TOL};
pub use solver::{
    solve_reduced_mse, BarrierReport, GradientReport, QuarterDiskMesh, ReducedSolution,
    SolverOptions,
};

/// Default `B` and `D`; only "sufficiently large" is required.
pub const DEFAULT_B: f64 = 10.0;
pub const DEFAULT_D: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BdggParams {
    /// Half-dimension; the graph lives over `R^{2m}`.
    pub m: usize,
    pub p: f64,
    pub delta: f64,
    /// Growth exponent of `f₁`; NaN when `delta < 0`.
    pub alpha: f64,
    /// Open interval `(α(2p+1)/(2p+2), min{α, p/α²})`.
    pub lambda_range: (f64, f64),
    /// Exponent inside `P` and `f₂`; the midpoint of the range by default.
    pub lambda: f64,
    pub b: f64,
    pub d: f64,
    pub valid: bool,
}

impl BdggParams {
    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        let (lo, hi) = self.lambda_range;
        if !(lo < lambda && lambda < hi) {
            return Err(Error::InvalidSpec(format!(
                "λ = {lambda} outside ({lo}, {hi})"
            )));
        }
        self.lambda = lambda;
        Ok(self)
    }

    pub fn with_constants(mut self, b: f64, d: f64) -> Result<Self> {
        if !(b > 0.0 && d > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "B = {b} and D = {d} must be positive"
            )));
        }
        self.b = b;
        self.d = d;
        Ok(self)
    }

    pub(crate) fn require_valid(&self) -> Result<()> {
        if self.valid {
            Ok(())
        } else {
            Err(Error::InvalidParams { m: self.m })
        }
    }
}

pub fn params(m: usize) -> BdggParams {
    let p = m as f64 - 1.0;
    let delta = 4.0 * p * p - 12.0 * p + 1.0;
    let alpha = if delta >= 0.0 {
        (2.0 * p + 1.0 - delta.sqrt()) / 4.0
    } else {
        f64::NAN
    };
    let lo = alpha * (2.0 * p + 1.0) / (2.0 * p + 2.0);
    let hi = alpha.min(p / (alpha * alpha));
    let valid = m >= 4 && lo < hi;
    BdggParams {
        m,
        p,
        delta,
        alpha,
        lambda_range: (lo, hi),
        lambda: 0.5 * (lo + hi),
        b: DEFAULT_B,
        d: DEFAULT_D,
        valid,
    }
}

/// Block radii `(u, v)` of a point of `R^{2m}`.
pub fn block_radii(params: &BdggParams, x: &[f64]) -> Result<(f64, f64)> {
    let m = params.m;
    if x.len() != 2 * m {
        return Err(Error::UnsupportedDimension {
            expected: 2 * m,
            got: x.len(),
        });
    }
    let norm = |s: &[f64]| s.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok((norm(&x[..m]), norm(&x[m..])))
}

/// `f₁` in the reduced variables.
pub fn f1_uv(params: &BdggParams, u: f64, v: f64) -> Result<f64> {
    params.require_valid()?;
    let s = u * u + v * v;
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok((u * u - v * v) * s.powf(params.alpha - 1.0))
}

pub fn f1(params: &BdggParams, x: &[f64]) -> Result<f64> {
    let (u, v) = block_radii(params, x)?;
    f1_uv(params, u, v)
}

/// `f₁/|x|^{2α} = (u² − v²)/(u² + v²)`, in closed form.
pub fn f1_normalized(params: &BdggParams, u: f64, v: f64) -> Result<f64> {
    params.require_valid()?;
    let s = u * u + v * v;
    if s == 0.0 {
        return Err(Error::InvalidSpec(
            "f₁/|x|^{2α} is undefined at the origin".into(),
        ));
    }
    Ok((u * u - v * v) / s)
}

/// Argument of `P` in `f₂`.
pub(crate) fn f2_argument(params: &BdggParams, u: f64, v: f64) -> Result<f64> {
    let s = u * u + v * v;
    if s == 0.0 {
        return Ok(0.0);
    }
    let diff = u * u - v * v;
    let f1 = f1_uv(params, u, v)?;
    Ok(diff + f1 * (1.0 + params.d * (diff / s).abs().powf(params.lambda - 1.0)))
}

pub fn f2_uv(profile: &Profile, u: f64, v: f64) -> Result<f64> {
    profile.eval(f2_argument(profile.params(), u, v)?)
}

pub fn f2(profile: &Profile, x: &[f64]) -> Result<f64> {
    let (u, v) = block_radii(profile.params(), x)?;
    f2_uv(profile, u, v)
}
