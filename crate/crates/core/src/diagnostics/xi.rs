use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{extrinsic_calculus, BasePoint, Immersion};
use crate::meshing::region_box;

/// Band sup and width below which the last shells count as converged to 0.
pub const XI_TOL: f64 = 5e-2;
/// Segments scanned for sign changes of `r̃ − r` along each sampling line.
const LINE_SEGMENTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellBand {
    pub r: f64,
    pub inf: f64,
    pub sup: f64,
    /// Points found on the sphere `{r̃ = r}`; the band is `[0, 0]` when none.
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiReport {
    pub bands: Vec<ShellBand>,
    /// Sup and width of the outermost nonempty band are below [`XI_TOL`] and
    /// the sups do not grow over the outer half of the shells.
    pub converged: bool,
    pub lines_per_axis: usize,
}

/// Additive-recurrence offsets in `[0, 1)` for the transverse coordinates.
fn transverse_offset(i: usize, d: usize) -> f64 {
    const ALPHA: [f64; 4] = [
        0.618_033_988_749_895,
        0.754_877_666_246_693,
        0.569_840_290_998_053,
        0.682_327_803_828_019,
    ];
    (0.5 + (i + 1) as f64 * ALPHA[d % ALPHA.len()]).fract()
}

/// Points on `{r̃ = r}` found by bisection along chart lines parallel to the
/// axes, spread over the chart box that contains the ball.
pub(crate) fn sphere_points(
    imm: &Immersion,
    base: &BasePoint,
    r: f64,
    lines: usize,
) -> Result<Vec<Vec<f64>>> {
    let n = imm.dim();
    let (lo, hi) = if n == 2 {
        match region_box(imm, base, f64::NEG_INFINITY, r)? {
            Some((lo, hi, _)) => (lo.to_vec(), hi.to_vec()),
            None => return Ok(Vec::new()),
        }
    } else {
        imm.domain().bounds()
    };
    let a = &base.ambient_point;
    let domain = imm.domain();
    let f = |q: &[f64]| imm.distance_to(q, a) - r;
    let mut jobs = Vec::new();
    for axis in 0..n {
        for i in 0..lines {
            let mut q0 = vec![0.0; n];
            let mut dd = 0;
            for (k, x) in q0.iter_mut().enumerate() {
                if k == axis {
                    continue;
                }
                let t = if n == 2 {
                    (i as f64 + 0.5) / lines as f64
                } else {
                    transverse_offset(i, dd)
                };
                dd += 1;
                *x = lo[k] + t * (hi[k] - lo[k]);
            }
            jobs.push((axis, q0));
        }
    }
    let found: Vec<Vec<Vec<f64>>> = jobs
        .par_iter()
        .map(|(axis, q0)| {
            let at = |s: f64| {
                let mut q = q0.clone();
                q[*axis] = s;
                q
            };
            let mut out = Vec::new();
            let h = (hi[*axis] - lo[*axis]) / LINE_SEGMENTS as f64;
            let mut prev: Option<(f64, f64)> = None;
            for j in 0..=LINE_SEGMENTS {
                let s = lo[*axis] + j as f64 * h;
                let q = at(s);
                if !domain.contains(&q) {
                    prev = None;
                    continue;
                }
                let v = f(&q);
                if let Some((sp, vp)) = prev {
                    if (vp < 0.0) != (v < 0.0) {
                        let (mut a0, mut b0, mut fa) = (sp, s, vp);
                        for _ in 0..60 {
                            let m = 0.5 * (a0 + b0);
                            let fm = f(&at(m));
                            if (fm < 0.0) == (fa < 0.0) {
                                a0 = m;
                                fa = fm;
                            } else {
                                b0 = m;
                            }
                        }
                        out.push(at(0.5 * (a0 + b0)));
                    }
                }
                prev = Some((s, v));
            }
            out
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// Per-shell `[inf, sup]` of `|dr̃(ν)|` on the spheres `{r̃ = r}`.
pub fn xi_estimate(
    imm: &Immersion,
    base: &BasePoint,
    shells: &[f64],
    lines_per_axis: usize,
) -> Result<XiReport> {
    if shells.windows(2).any(|w| w[1] <= w[0]) || shells.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidSpec(
            "shell radii must be positive and strictly ascending".into(),
        ));
    }
    if lines_per_axis == 0 {
        return Err(Error::InvalidSpec(
            "at least one sampling line per axis".into(),
        ));
    }
    let mut bands = Vec::with_capacity(shells.len());
    for &r in shells {
        let pts = sphere_points(imm, base, r, lines_per_axis)?;
        let vals: Vec<f64> = pts
            .iter()
            .map(|q| extrinsic_calculus(imm, base, q).map(|c| c.normal_component.abs()))
            .collect::<Result<_>>()?;
        let (inf, sup) = if vals.is_empty() {
            (0.0, 0.0)
        } else {
            (
                vals.iter().copied().fold(f64::INFINITY, f64::min),
                vals.iter().copied().fold(0.0, f64::max),
            )
        };
        bands.push(ShellBand {
            r,
            inf,
            sup,
            samples: vals.len(),
        });
    }
    let filled: Vec<&ShellBand> = bands.iter().filter(|b| b.samples > 0).collect();
    let converged = match filled.last() {
        Some(last) => {
            let outer = &filled[filled.len() / 2..];
            last.sup <= XI_TOL
                && last.sup - last.inf <= XI_TOL
                && outer.windows(2).all(|w| w[1].sup <= w[0].sup + 1e-9)
        }
        None => false,
    };
    Ok(XiReport {
        bands,
        converged,
        lines_per_axis,
    })
}
