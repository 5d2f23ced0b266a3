use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    calc_from_frame, frame_from_jet, BaseConvention, BasePoint, ChartDomain, Immersion,
};
use crate::surfaces::GraphFunctionSpec;

/// `sup r̃·max|κ|` may exceed 1 by this much and still pass.
pub const SUP_TOL: f64 = 1e-9;
/// A strictness witness must sit this far below 1.
pub const STRICT_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSampling {
    /// Grid points per chart axis (inclusive of both ends on non-periodic axes).
    pub per_axis: usize,
    /// Ascending shell radii for the decay trends and `ξ` bands.
    pub shells: Vec<f64>,
    /// Chart window `(lo, hi)` to sample instead of the full domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(Vec<f64>, Vec<f64>)>,
}

impl CurvatureSampling {
    pub fn new(per_axis: usize, shells: Vec<f64>) -> Self {
        Self {
            per_axis,
            shells,
            window: None,
        }
    }

    pub fn with_window(mut self, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        self.window = Some((lo, hi));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub chart: Vec<f64>,
    pub r_tilde: f64,
    pub max_kappa: f64,
    /// `r̃·max|κ_i|`.
    pub scaled_kappa: f64,
    /// `‖A‖`.
    pub a_norm: f64,
    /// `|dr̃(ν)|`.
    pub xi: f64,
    pub min_hess_h: f64,
    /// Riemannian volume of the grid cell the sample represents.
    pub weight: f64,
}

impl CurvatureSample {
    pub fn scaled_a_norm(&self) -> f64 {
        self.r_tilde * self.a_norm
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub chart: Vec<f64>,
    pub r_tilde: f64,
    pub value: f64,
}

/// Chart bounding box of the samples where `r̃·max|κ| ≥ 1 − STRICT_MARGIN`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualitySet {
    pub count: usize,
    pub chart_lo: Vec<f64>,
    pub chart_hi: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailReason {
    ExceedsBound,
    NoStrictWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CurvatureBoundVerdict {
    PassStrict {
        sup: f64,
        witness: Witness,
    },
    PassEqualityOnlyAt {
        sup: f64,
        equality: EqualitySet,
        witness: Witness,
    },
    Fail {
        reason: FailReason,
        witness: Witness,
    },
}

impl CurvatureBoundVerdict {
    pub fn passed(&self) -> bool {
        !matches!(self, Self::Fail { .. })
    }
}

/// Decay of `r̃‖A‖`: the sup over `{r̃ ≥ r}` and the sup over the shell
/// `[r, next)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellTrend {
    pub r: f64,
    pub tail_sup: f64,
    pub shell_sup: f64,
}

/// `[inf, sup]` of `|dr̃(ν)|` over the samples with `r_inner ≤ r̃ < r_outer`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiBand {
    pub r_inner: f64,
    pub r_outer: f64,
    pub inf: f64,
    pub sup: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureIntegralRow {
    pub r: f64,
    /// `∫_{B̃_r} ‖A‖²`.
    pub integral: f64,
    /// `integral / r^{n−2}`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphHessianAudit {
    /// `sup |D²f(X,X)|²(|x|² + f²)/(1 + |Df|²)` over unit `X` and the samples.
    pub sup_ratio: f64,
    pub min_ratio: f64,
    pub passed: bool,
    pub strict: bool,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureAudit {
    pub n: usize,
    pub base_convention: BaseConvention,
    pub per_axis: usize,
    #[serde(skip)]
    pub samples: Vec<CurvatureSample>,
    pub sample_count: usize,
    pub sup_scaled_kappa: f64,
    pub curvature_bound: CurvatureBoundVerdict,
    pub decay_trend: Vec<ShellTrend>,
    /// Grid estimate of `∫‖A‖ⁿ` over the sampled chart.
    pub total_curvature_n: f64,
    pub miranda_a2: Vec<CurvatureIntegralRow>,
    pub xi_bands: Vec<XiBand>,
    pub min_hess_h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_hessian: Option<GraphHessianAudit>,
}

/// Grid points and the chart volume of one grid cell.
pub(crate) fn chart_grid(
    domain: &ChartDomain,
    window: Option<&(Vec<f64>, Vec<f64>)>,
    per_axis: usize,
) -> (Vec<Vec<f64>>, f64) {
    let (lo, hi) = match window {
        Some((lo, hi)) => (lo.clone(), hi.clone()),
        None => domain.bounds(),
    };
    let n = lo.len();
    let steps: Vec<(usize, f64)> = (0..n)
        .map(|k| {
            let periodic = window.is_none() && domain.is_periodic(k);
            let (count, div) = if periodic {
                (per_axis, per_axis)
            } else {
                (per_axis, per_axis.saturating_sub(1).max(1))
            };
            (count, (hi[k] - lo[k]) / div as f64)
        })
        .collect();
    let cell: f64 = steps.iter().map(|s| s.1).product();
    let total: usize = steps.iter().map(|s| s.0).product();
    let pts = (0..total)
        .filter_map(|mut idx| {
            let q: Vec<f64> = (0..n)
                .map(|k| {
                    let i = idx % steps[k].0;
                    idx /= steps[k].0;
                    lo[k] + i as f64 * steps[k].1
                })
                .collect();
            domain.contains(&q).then_some(q)
        })
        .collect();
    (pts, cell)
}

fn evaluate(
    imm: &Immersion,
    base: &BasePoint,
    q: &[f64],
    cell: f64,
) -> Result<Option<CurvatureSample>> {
    let jet = imm.jet(q);
    let frame = frame_from_jet(&jet, q)?;
    let calc = match calc_from_frame(&jet, &frame, base) {
        Ok(c) => c,
        Err(Error::BaseCoincides { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let max_kappa = frame.max_abs_curvature();
    Ok(Some(CurvatureSample {
        chart: q.to_vec(),
        r_tilde: calc.r_tilde,
        max_kappa,
        scaled_kappa: calc.r_tilde * max_kappa,
        a_norm: frame.second_form_norm(),
        xi: calc.normal_component.abs(),
        min_hess_h: calc.min_hess_h_eigenvalue(),
        weight: frame.volume_density() * cell,
    }))
}

/// Compass search for a local maximum of `r̃·max|κ|` starting from `q`.
fn refine_max(
    imm: &Immersion,
    base: &BasePoint,
    start: &CurvatureSample,
    step0: f64,
) -> CurvatureSample {
    let domain = imm.domain();
    let mut best = start.clone();
    let mut step = step0;
    while step > 1e-9 * (1.0 + step0) {
        let mut moved = false;
        for k in 0..best.chart.len() {
            for s in [-1.0, 1.0] {
                let mut q = best.chart.clone();
                q[k] += s * step;
                domain.wrap(&mut q);
                if !domain.contains(&q) {
                    continue;
                }
                if let Ok(Some(c)) = evaluate(imm, base, &q, 0.0) {
                    if c.scaled_kappa > best.scaled_kappa {
                        best = CurvatureSample {
                            weight: best.weight,
                            ..c
                        };
                        moved = true;
                    }
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best
}

fn witness(s: &CurvatureSample) -> Witness {
    Witness {
        chart: s.chart.clone(),
        r_tilde: s.r_tilde,
        value: s.scaled_kappa,
    }
}

/// Samples `r̃·max|κ|`, `r̃‖A‖`, `|dr̃(ν)|` and `Hess h` on a chart grid and
/// grades the curvature-decay hypotheses.
pub fn curvature_audit(
    imm: &Immersion,
    base: &BasePoint,
    sampling: &CurvatureSampling,
) -> Result<CurvatureAudit> {
    if sampling.per_axis < 2 {
        return Err(Error::InvalidSpec(
            "curvature sampling needs at least 2 points per axis".into(),
        ));
    }
    if sampling.shells.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSpec(
            "shell radii must be strictly ascending".into(),
        ));
    }
    let n = imm.dim();
    let (grid, cell) = chart_grid(imm.domain(), sampling.window.as_ref(), sampling.per_axis);
    let samples: Vec<CurvatureSample> = grid
        .par_iter()
        .map(|q| evaluate(imm, base, q, cell))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let Some(top) = samples
        .iter()
        .max_by(|a, b| a.scaled_kappa.total_cmp(&b.scaled_kappa))
    else {
        return Err(Error::InvalidSpec("no usable curvature samples".into()));
    };
    let spacing = cell.powf(1.0 / n as f64);
    let refined = refine_max(imm, base, top, spacing);
    let sup = refined.scaled_kappa;
    let low = samples
        .iter()
        .min_by(|a, b| a.scaled_kappa.total_cmp(&b.scaled_kappa))
        .expect("nonempty");

    let curvature_bound = if sup > 1.0 + SUP_TOL {
        CurvatureBoundVerdict::Fail {
            reason: FailReason::ExceedsBound,
            witness: witness(&refined),
        }
    } else if low.scaled_kappa >= 1.0 - STRICT_MARGIN {
        CurvatureBoundVerdict::Fail {
            reason: FailReason::NoStrictWitness,
            witness: witness(low),
        }
    } else if sup >= 1.0 - STRICT_MARGIN {
        let near: Vec<&CurvatureSample> = samples
            .iter()
            .filter(|s| s.scaled_kappa >= 1.0 - STRICT_MARGIN)
            .collect();
        let mut chart_lo = refined.chart.clone();
        let mut chart_hi = refined.chart.clone();
        for s in &near {
            for k in 0..n {
                chart_lo[k] = chart_lo[k].min(s.chart[k]);
                chart_hi[k] = chart_hi[k].max(s.chart[k]);
            }
        }
        CurvatureBoundVerdict::PassEqualityOnlyAt {
            sup,
            equality: EqualitySet {
                count: near.len().max(1),
                chart_lo,
                chart_hi,
            },
            witness: witness(low),
        }
    } else {
        CurvatureBoundVerdict::PassStrict {
            sup,
            witness: witness(low),
        }
    };

    let shells = &sampling.shells;
    let decay_trend = shells
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let next = shells.get(i + 1).copied().unwrap_or(f64::INFINITY);
            let tail = samples.iter().filter(|s| s.r_tilde >= r);
            let shell = samples
                .iter()
                .filter(|s| s.r_tilde >= r && s.r_tilde < next);
            ShellTrend {
                r,
                tail_sup: tail.map(|s| s.scaled_a_norm()).fold(0.0, f64::max),
                shell_sup: shell.map(|s| s.scaled_a_norm()).fold(0.0, f64::max),
            }
        })
        .collect();
    let xi_bands = shells
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let next = shells.get(i + 1).copied().unwrap_or(f64::INFINITY);
            let vals: Vec<f64> = samples
                .iter()
                .filter(|s| s.r_tilde >= r && s.r_tilde < next)
                .map(|s| s.xi)
                .collect();
            XiBand {
                r_inner: r,
                r_outer: next,
                inf: vals.iter().copied().fold(f64::INFINITY, f64::min),
                sup: vals.iter().copied().fold(0.0, f64::max),
                samples: vals.len(),
            }
        })
        .collect();
    let miranda_a2 = shells
        .iter()
        .map(|&r| {
            let integral: f64 = samples
                .iter()
                .filter(|s| s.r_tilde <= r)
                .map(|s| s.a_norm * s.a_norm * s.weight)
                .sum();
            CurvatureIntegralRow {
                r,
                integral,
                ratio: integral / r.powi(n as i32 - 2),
            }
        })
        .collect();

    Ok(CurvatureAudit {
        n,
        base_convention: base.convention(),
        per_axis: sampling.per_axis,
        sample_count: samples.len(),
        sup_scaled_kappa: sup,
        curvature_bound,
        decay_trend,
        total_curvature_n: samples
            .iter()
            .map(|s| s.a_norm.powi(n as i32) * s.weight)
            .sum(),
        miranda_a2,
        xi_bands,
        min_hess_h: samples
            .iter()
            .map(|s| s.min_hess_h)
            .fold(f64::INFINITY, f64::min),
        graph_hessian: None,
        samples,
    })
}

/// Checks `|D²f(x)(X,X)|² ≤ (1 + |Df|²)/(|x|² + f²)` for `|X| ≤ 1` on a grid,
/// after shifting `f` so that `f(0) = 0`.
pub fn graph_hessian_audit(
    func: &GraphFunctionSpec,
    domain: &ChartDomain,
    per_axis: usize,
) -> GraphHessianAudit {
    let n = func.n;
    let f0 = (func.f)(&vec![0.0; n]);
    let (grid, _) = chart_grid(domain, None, per_axis);
    let ratios: Vec<f64> = grid
        .par_iter()
        .filter_map(|x| {
            let x2: f64 = x.iter().map(|v| v * v).sum();
            let f = (func.f)(x) - f0;
            let denom = x2 + f * f;
            if denom < 1e-24 {
                return None;
            }
            let df = (func.df)(x);
            let hess = nalgebra::DMatrix::from_row_slice(n, n, &(func.d2f)(x));
            let top = nalgebra::SymmetricEigen::new(hess)
                .eigenvalues
                .iter()
                .fold(0.0_f64, |m, e| m.max(e.abs()));
            let grad2: f64 = df.iter().map(|v| v * v).sum();
            Some(top * top * denom / (1.0 + grad2))
        })
        .collect();
    let sup_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    GraphHessianAudit {
        sup_ratio,
        min_ratio,
        passed: sup_ratio <= 1.0 + SUP_TOL,
        strict: min_ratio < 1.0 - STRICT_MARGIN,
        samples: ratios.len(),
    }
}
