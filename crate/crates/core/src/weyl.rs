//! Weyl sequences from annular cutoffs of extrinsic distance.
//!
//! `u = √η ψ(ε r̃) e^{i√λ r̃}` with `η = 1/V(D(c/ε, d/ε))`. The residual
//! `Δu + ζ²λu` splits into a cutoff-curvature term, a `Δr̃` term and a
//! normal-alignment term; each squared norm is integrated and compared with
//! its analytic bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::sphere_points;
use crate::error::{Error, Result};
use crate::geometry::{extrinsic_calculus, BasePoint, Immersion};
use crate::meshing::{integrate, region_box, volume_density, QuadratureOptions, Region};

/// Cutoff derivative constant; dominates the quintic maxima `15/8` and `10/√3`.
pub const DEFAULT_E: f64 = 8.0;
/// Schedule spacing `d_m = m·d₀`. Large enough that `ε` stays fixed along the
/// default schedule, so the residual decays like `ε/c_m`.
pub const DEFAULT_D0: f64 = 64.0;
/// Mass may fall short of `τ` by this much.
pub const MASS_TOL: f64 = 1e-2;
/// Relative slack on the analytic bounds.
pub const BOUND_TOL: f64 = 1e-6;
/// Grid points per axis when sampling the alignment sup over an annulus.
const SUP_GRID: usize = 160;
/// Spheres (including both rims) sampled exactly for the alignment sup.
const SUP_SHELLS: usize = 17;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylConfig {
    pub n: usize,
    /// Upper volume-ratio constant `V(r) ≤ C_n rⁿ`.
    pub c_n: f64,
    /// Lower volume-ratio constant `V(r) ≥ F_n rⁿ`.
    pub f_n: f64,
    /// Schedule exponent; `a_m = d_m/(2^α θ)`.
    pub alpha_shape: f64,
    pub m_max: usize,
    pub lambda: f64,
    pub d0: f64,
    pub e: f64,
}

impl WeylConfig {
    pub fn new(n: usize, c_n: f64, f_n: f64) -> Self {
        Self {
            n,
            c_n,
            f_n,
            alpha_shape: 2.0,
            m_max: 6,
            lambda: 1.0,
            d0: DEFAULT_D0,
            e: DEFAULT_E,
        }
    }
}

/// Radii `c < a < b < d` of one annulus with its scale `ε = 2^{−k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRow {
    pub m: usize,
    pub c: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub k: u32,
    pub eps: f64,
    /// Bound on `|ψ'|` and `|ψ''|`.
    pub c_m: f64,
}

impl ScheduleRow {
    pub fn cutoff(&self) -> Cutoff {
        Cutoff {
            c: self.c,
            a: self.a,
            b: self.b,
            d: self.d,
        }
    }

    /// Extrinsic radii `(c/ε, d/ε)` of the support annulus.
    pub fn support(&self) -> (f64, f64) {
        (self.c / self.eps, self.d / self.eps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylSchedule {
    pub config: WeylConfig,
    /// `θ = (C_n/F_n)^{1/n}`.
    pub theta: f64,
    /// Mass lower bound `θ^{−n}(2^{−n} − 2^{−αn})`.
    pub tau: f64,
    pub rows: Vec<ScheduleRow>,
}

pub fn build_schedule(cfg: &WeylConfig) -> Result<WeylSchedule> {
    if !(cfg.f_n > 0.0) || !(cfg.c_n >= cfg.f_n) {
        return Err(Error::InvalidRatio {
            c_n: cfg.c_n,
            f_n: cfg.f_n,
        });
    }
    if !(cfg.alpha_shape > 1.0) {
        return Err(Error::InvalidSchedule(format!(
            "exponent α = {} must exceed 1",
            cfg.alpha_shape
        )));
    }
    if !(cfg.lambda > 0.0) {
        return Err(Error::InvalidSchedule(format!(
            "λ = {} must be positive",
            cfg.lambda
        )));
    }
    if cfg.m_max == 0 || cfg.n == 0 || !(cfg.d0 > 0.0) || !(cfg.e > 0.0) {
        return Err(Error::InvalidSchedule(
            "m_max, n, d0 and E must be positive".into(),
        ));
    }
    let n = cfg.n as f64;
    let theta = (cfg.c_n / cfg.f_n).powf(1.0 / n);
    let tau = theta.powf(-n) * (2f64.powf(-n) - 2f64.powf(-cfg.alpha_shape * n));
    let rows = (1..=cfg.m_max)
        .map(|m| {
            let d = m as f64 * cfg.d0;
            let b = d / 2.0;
            let a = d / (2f64.powf(cfg.alpha_shape) * theta);
            let c = a / 2.0;
            let (w1, w2) = (a - c, d - b);
            let c_m = cfg.e * (1.0 / w1 + 1.0 / w2 + 1.0 / (w1 * w1) + 1.0 / (w2 * w2));
            // Smallest k with 2^{−k} C_m ≤ 1/m.
            let k = (m as f64 * c_m).log2().ceil().max(0.0) as u32;
            ScheduleRow {
                m,
                c,
                a,
                b,
                d,
                k,
                eps: 2f64.powi(-(k as i32)),
                c_m,
            }
        })
        .collect();
    Ok(WeylSchedule {
        config: cfg.clone(),
        theta,
        tau,
        rows,
    })
}

/// `C²` plateau function with quintic smoothstep transitions on `[c, a]` and
/// `[b, d]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub c: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

/// `S(x) = 6x⁵ − 15x⁴ + 10x³` with its first two derivatives.
fn smoothstep(x: f64) -> (f64, f64, f64) {
    let x2 = x * x;
    (
        x2 * x * (10.0 - 15.0 * x + 6.0 * x2),
        30.0 * x2 * (1.0 - x) * (1.0 - x),
        60.0 * x * (1.0 - x) * (1.0 - 2.0 * x),
    )
}

impl Cutoff {
    /// `(ψ, ψ', ψ'')` at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        if t <= self.c || t >= self.d {
            (0.0, 0.0, 0.0)
        } else if t < self.a {
            let w = self.a - self.c;
            let (s, s1, s2) = smoothstep((t - self.c) / w);
            (s, s1 / w, s2 / (w * w))
        } else if t <= self.b {
            (1.0, 0.0, 0.0)
        } else {
            let w = self.d - self.b;
            let (s, s1, s2) = smoothstep((self.d - t) / w);
            (s, -s1 / w, s2 / (w * w))
        }
    }

    /// Exact `(max|ψ'|, max|ψ''|)`: `15/(8w)` and `10/(√3 w²)` for the
    /// narrower transition.
    pub fn derivative_maxima(&self) -> (f64, f64) {
        let w = (self.a - self.c).min(self.d - self.b);
        (15.0 / (8.0 * w), 10.0 / (3f64.sqrt() * w * w))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylRow {
    pub m: usize,
    pub eps: f64,
    pub c_m: f64,
    pub inner: f64,
    pub outer: f64,
    pub eta: f64,
    /// `∫|u|²`.
    pub mass: f64,
    pub cutoff_term: f64,
    pub cutoff_bound: f64,
    pub laplacian_term: f64,
    pub laplacian_bound: f64,
    pub alignment_term: f64,
    pub alignment_bound: f64,
    /// `‖Δu + ζ²λu‖ / ‖u‖`.
    pub residual_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylReport {
    pub lambda: f64,
    pub xi: f64,
    /// `ζ² = 1 − ξ²`.
    pub zeta2: f64,
    /// `ζ²λ`, the spectral value the sequence certifies.
    pub certified_value: f64,
    pub tau: f64,
    pub quadrature_level: u32,
    pub rows: Vec<WeylRow>,
    pub mass_verdict: bool,
    pub bound_verdict: bool,
    /// `residual_ratio` nonincreasing along the schedule.
    pub monotone_verdict: bool,
}

/// `sup_D (ξ² − dr̃(ν)²)²` sampled on a chart grid over the annulus and on
/// geometrically spaced spheres, rims included.
fn alignment_sup(
    imm: &Immersion,
    base: &BasePoint,
    inner: f64,
    outer: f64,
    xi: f64,
) -> Result<f64> {
    let Some((lo, hi, _)) = region_box(imm, base, inner, outer)? else {
        return Ok(0.0);
    };
    let gap = |nc: f64| {
        let g = xi * xi - nc * nc;
        g * g
    };
    let mut best = 0.0_f64;
    for i in 0..SUP_SHELLS {
        let r = inner * (outer / inner).powf(i as f64 / (SUP_SHELLS - 1) as f64);
        for q in sphere_points(imm, base, r, 8)? {
            best = best.max(gap(extrinsic_calculus(imm, base, &q)?.normal_component));
        }
    }
    let domain = imm.domain();
    let vals: Vec<f64> = (0..SUP_GRID * SUP_GRID)
        .into_par_iter()
        .filter_map(|idx| {
            let (i, j) = (idx % SUP_GRID, idx / SUP_GRID);
            let q = [
                lo[0] + (hi[0] - lo[0]) * (i as f64 + 0.5) / SUP_GRID as f64,
                lo[1] + (hi[1] - lo[1]) * (j as f64 + 0.5) / SUP_GRID as f64,
            ];
            if !domain.contains(&q) {
                return None;
            }
            let calc = extrinsic_calculus(imm, base, &q).ok()?;
            (calc.r_tilde >= inner && calc.r_tilde <= outer).then(|| gap(calc.normal_component))
        })
        .collect();
    Ok(vals.into_iter().fold(best, f64::max))
}

/// Integrates one schedule row.
pub fn residual(
    imm: &Immersion,
    base: &BasePoint,
    schedule: &WeylSchedule,
    m: usize,
    xi: f64,
    level: u32,
) -> Result<WeylRow> {
    let row = *schedule
        .rows
        .iter()
        .find(|r| r.m == m)
        .ok_or_else(|| Error::InvalidSpec(format!("schedule has no row m = {m}")))?;
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::InvalidSpec(format!("ξ = {xi} must lie in [0, 1]")));
    }
    let lambda = schedule.config.lambda;
    let n = imm.dim() as f64;
    let zeta2 = 1.0 - xi * xi;
    let sl = lambda.sqrt();
    let eps = row.eps;
    let psi = row.cutoff();
    let (inner, outer) = row.support();

    // Components: volume, |u|², |(11)|², |(12)|², |(13)|², |total|², all with η = 1.
    let density = |q: &[f64; 2]| -> [f64; 6] {
        let Ok(calc) = extrinsic_calculus(imm, base, q) else {
            return [0.0; 6];
        };
        let w = volume_density(imm, q);
        let r = calc.r_tilde;
        let (p, p1, p2) = psi.eval(eps * r);
        let g2 = calc.grad_norm * calc.grad_norm;
        let phase = (sl * r).sin_cos();
        let rot = |re: f64, im: f64| (re * phase.1 - im * phase.0, re * phase.0 + im * phase.1);
        let cutoff_term = rot(eps * eps * p2 * g2, eps * 2.0 * sl * p1 * g2);
        let laplacian_term = rot(eps * p1 * calc.laplacian_r, sl * p * calc.laplacian_r);
        let t13_scale = lambda * (zeta2 - g2) * p;
        let alignment_term = rot(t13_scale, 0.0);
        let total = (
            cutoff_term.0 + laplacian_term.0 + alignment_term.0,
            cutoff_term.1 + laplacian_term.1 + alignment_term.1,
        );
        let sq = |z: (f64, f64)| z.0 * z.0 + z.1 * z.1;
        [
            w,
            p * p * w,
            sq(cutoff_term) * w,
            sq(laplacian_term) * w,
            sq(alignment_term) * w,
            sq(total) * w,
        ]
    };
    let res = integrate(
        imm,
        &Region::Annulus {
            base: base.clone(),
            inner,
            outer,
        },
        &QuadratureOptions::adaptive(level),
        density,
        |_, _| [0.0; 6],
    )?;
    let [vol, mass, cutoff_term, laplacian_term, alignment_term, total] = res.domain;
    if !(vol > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "annulus ({inner}, {outer}) misses the surface"
        )));
    }
    let eta = 1.0 / vol;
    let cm2 = row.c_m * row.c_m;
    Ok(WeylRow {
        m,
        eps,
        c_m: row.c_m,
        inner,
        outer,
        eta,
        mass: mass * eta,
        cutoff_term: cutoff_term * eta,
        cutoff_bound: eps * eps * 2.0 * cm2 * (eps * eps + 2.0 * lambda),
        laplacian_term: laplacian_term * eta,
        laplacian_bound: eps * eps / (row.c * row.c) * 2.0 * (eps * eps * cm2 + lambda) * n,
        alignment_term: alignment_term * eta,
        alignment_bound: lambda * lambda * alignment_sup(imm, base, inner, outer, xi)?,
        residual_ratio: (total / mass).sqrt(),
    })
}

/// Every schedule row, evaluated concurrently.
pub fn weyl_report(
    imm: &Immersion,
    base: &BasePoint,
    schedule: &WeylSchedule,
    xi: f64,
    level: u32,
) -> Result<WeylReport> {
    let rows: Vec<WeylRow> = schedule
        .rows
        .par_iter()
        .map(|r| residual(imm, base, schedule, r.m, xi, level))
        .collect::<Result<_>>()?;
    let lambda = schedule.config.lambda;
    let mass_verdict = rows.iter().all(|r| r.mass >= schedule.tau - MASS_TOL);
    let bound_verdict = rows.iter().all(|r| {
        r.cutoff_term <= r.cutoff_bound * (1.0 + BOUND_TOL)
            && r.laplacian_term <= r.laplacian_bound * (1.0 + BOUND_TOL)
            && r.alignment_term <= r.alignment_bound * (1.0 + BOUND_TOL) + 1e-15
    });
    let monotone_verdict = rows
        .windows(2)
        .all(|w| w[1].residual_ratio <= w[0].residual_ratio);
    Ok(WeylReport {
        lambda,
        xi,
        zeta2: 1.0 - xi * xi,
        certified_value: (1.0 - xi * xi) * lambda,
        tau: schedule.tau,
        quadrature_level: level,
        rows,
        mass_verdict,
        bound_verdict,
        monotone_verdict,
    })
}
