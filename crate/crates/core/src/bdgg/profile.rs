//! The profile integral
//! `P(z) = ∫₀^z exp(B ∫_{|w|}^∞ t^{λ−2}(1 + t^{2α(λ−1)})^{−1} dt) dw`.
//!
//! Both integrals have algebraic endpoint behavior; the substitutions
//! `t = y^{1/(λ−1)}` on `[0, 1]` and `t = y^{−1/(γ−1)}` on `[1, ∞)`, with
//! `γ = 2 − λ + 2α(λ−1)` the tail decay exponent, turn them into bounded
//! integrands for Gauss–Kronrod.

use crate::error::{Error, Result};

use super::BdggParams;

/// Absolute tolerance on the inner integral.
pub const INNER_TOL: f64 = 1e-10;
/// Relative tolerance on the outer integral; `P` is of order `exp(B·I(0))`
/// near zero, so an absolute target would be meaningless.
pub const OUTER_TOL: f64 = 1e-8;
const MAX_SUBDIVISIONS: usize = 500;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate and `|Kronrod − Gauss|` on `[a, b]`.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive 15-point Gauss–Kronrod: bisects the interval with the
/// largest error estimate until the total estimate is below
/// `max(abs_tol, rel_tol·|I|)`.
pub fn gk15_adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    for _ in 0..MAX_SUBDIVISIONS {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            break;
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("nonempty");
        let (lo, hi, ..) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    let total: f64 = parts.iter().map(|p| p.2).sum();
    let err: f64 = parts.iter().map(|p| p.3).sum();
    Err(Error::QuadratureFailure {
        tol: abs_tol.max(rel_tol * total.abs()),
        estimate: err,
    })
}

/// Evaluator for `P` with the substitution constants precomputed.
#[derive(Debug, Clone)]
pub struct Profile {
    params: BdggParams,
    /// `1/(λ−1)`.
    beta: f64,
    /// `1/(γ−1)`.
    kappa: f64,
    /// `2α(λ−1)`.
    e: f64,
    /// `I(0)`.
    total: f64,
}

impl Profile {
    pub fn new(params: &BdggParams) -> Result<Self> {
        params.require_valid()?;
        let lambda = params.lambda;
        let (lo, hi) = params.lambda_range;
        if !(lo < lambda && lambda < hi) {
            return Err(Error::InvalidSpec(format!(
                "λ = {lambda} outside ({lo}, {hi})"
            )));
        }
        let e = 2.0 * params.alpha * (lambda - 1.0);
        let gamma = 2.0 - lambda + e;
        let mut out = Self {
            params: params.clone(),
            beta: 1.0 / (lambda - 1.0),
            kappa: 1.0 / (gamma - 1.0),
            e,
            total: 0.0,
        };
        out.total = out.inner(0.0)?;
        Ok(out)
    }

    pub fn params(&self) -> &BdggParams {
        &self.params
    }

    /// `I(s) = ∫_s^∞ t^{λ−2}(1 + t^{2α(λ−1)})^{−1} dt` for `s ≥ 0`.
    pub fn inner(&self, s: f64) -> Result<f64> {
        let (beta, kappa, e) = (self.beta, self.kappa, self.e);
        let alpha2 = 2.0 * self.params.alpha;
        let mut total = 0.0;
        if s < 1.0 {
            let y0 = s.powf(1.0 / beta);
            total += gk15_adaptive(
                |y| beta / (1.0 + y.powf(alpha2)),
                y0,
                1.0,
                0.5 * INNER_TOL,
                0.0,
            )?;
        }
        let y1 = s.max(1.0).powf(-1.0 / kappa);
        total += gk15_adaptive(
            |y| kappa / (1.0 + y.powf(kappa * e)),
            0.0,
            y1,
            0.5 * INNER_TOL,
            0.0,
        )?;
        Ok(total)
    }

    /// `I(0)`; `P'(0) = exp(B·I(0))`.
    pub fn inner_at_zero(&self) -> f64 {
        self.total
    }

    fn integrand(&self, w: f64) -> f64 {
        // Quadrature failure inside an integrand surfaces as NaN, which the
        // outer loop reports as a failure.
        self.inner(w)
            .map_or(f64::NAN, |i| (self.params.b * i).exp())
    }

    pub fn eval(&self, z: f64) -> Result<f64> {
        let a = z.abs();
        if a == 0.0 {
            return Ok(0.0);
        }
        let beta = self.beta;
        let near = a.min(1.0);
        let mut total = gk15_adaptive(
            |y| {
                if y == 0.0 {
                    return 0.0;
                }
                beta * y.powf(beta - 1.0) * self.integrand(y.powf(beta))
            },
            0.0,
            near.powf(1.0 / beta),
            0.0,
            OUTER_TOL,
        )?;
        if a > 1.0 {
            total += gk15_adaptive(|w| self.integrand(w), 1.0, a, 0.0, OUTER_TOL)?;
        }
        if !total.is_finite() {
            return Err(Error::QuadratureFailure {
                tol: OUTER_TOL,
                estimate: total,
            });
        }
        Ok(total.copysign(z))
    }
}
