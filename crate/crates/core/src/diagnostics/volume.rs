use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, BaseConvention, BasePoint, Immersion};
use crate::meshing::extrinsic_ball_volume;

/// Relative slack allowed when checking that `V(r)/rⁿ` is nondecreasing.
pub const MONOTONE_TOL: f64 = 1e-3;
/// Margin by which `sup V/rⁿ` must exceed `ω_n` to raise the gap flag.
pub const GAP_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeGrowthReport {
    pub n: usize,
    pub base_convention: BaseConvention,
    pub quadrature_level: u32,
    pub radii: Vec<f64>,
    pub volumes: Vec<f64>,
    /// `V(r)/rⁿ`.
    pub ratios: Vec<f64>,
    pub monotone_verdict: bool,
    /// `max V/rⁿ`.
    pub c_n_estimate: f64,
    /// `min V/rⁿ` over the upper half of the radii.
    pub f_n_estimate: f64,
    /// Two-point extrapolation of `V/rⁿ` in `1/r` from the two largest radii.
    pub limit_estimate: f64,
    pub ends_bound: usize,
    /// Least-squares slope of `log V` against `r` over the upper half of the
    /// radii; an upper-bound proxy for the exponential growth rate.
    pub mu_estimate: f64,
    pub brooks_bound: f64,
    /// `(1/r) log V(r)` per radius.
    pub mu_partial: Vec<f64>,
    /// `((n+1)²/2) ω_{n+1} rⁿ`.
    pub miranda_rhs: Vec<f64>,
    pub miranda_verdict: bool,
    /// `sup V/rⁿ > ω_n`: the surface is not a plane through the base.
    pub gap_flag: bool,
    /// Some ball touched the chart truncation.
    pub truncated: bool,
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

/// Volume-growth table of extrinsic balls about `base`.
pub fn volume_growth(
    imm: &Immersion,
    base: &BasePoint,
    radii: &[f64],
    level: u32,
) -> Result<VolumeGrowthReport> {
    if radii.len() < 3 || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 0.0 {
        return Err(Error::InvalidSpec(
            "volume growth needs at least 3 positive ascending radii".into(),
        ));
    }
    let n = imm.dim();
    let omega = unit_ball_volume(n);
    let mut volumes = Vec::with_capacity(radii.len());
    let mut truncated = false;
    for &r in radii {
        let v = extrinsic_ball_volume(imm, base, r, level)?;
        truncated |= v.truncated;
        volumes.push(v.volume);
    }
    let ratios: Vec<f64> = radii
        .iter()
        .zip(&volumes)
        .map(|(r, v)| v / r.powi(n as i32))
        .collect();
    let monotone_verdict = ratios
        .windows(2)
        .all(|w| w[1] >= w[0] * (1.0 - MONOTONE_TOL));
    let c_n_estimate = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let half = radii.len() / 2;
    let f_n_estimate = ratios[half..].iter().copied().fold(f64::INFINITY, f64::min);

    let k = radii.len();
    let (r1, r2) = (radii[k - 2], radii[k - 1]);
    let limit_estimate = (r2 * ratios[k - 1] - r1 * ratios[k - 2]) / (r2 - r1);
    let ends_bound = ((c_n_estimate.max(limit_estimate) / omega + 1e-3).floor() as usize).max(1);

    let logs: Vec<f64> = volumes
        .iter()
        .map(|v| v.max(f64::MIN_POSITIVE).ln())
        .collect();
    let mu_estimate = least_squares_slope(&radii[half..], &logs[half..]).max(0.0);
    let mu_partial = radii.iter().zip(&logs).map(|(r, l)| l / r).collect();

    let miranda_const = ((n + 1) * (n + 1)) as f64 / 2.0 * unit_ball_volume(n + 1);
    let miranda_rhs: Vec<f64> = radii
        .iter()
        .map(|r| miranda_const * r.powi(n as i32))
        .collect();
    let miranda_verdict = volumes.iter().zip(&miranda_rhs).all(|(v, m)| v <= m);

    Ok(VolumeGrowthReport {
        n,
        base_convention: base.convention(),
        quadrature_level: level,
        radii: radii.to_vec(),
        volumes,
        ratios,
        monotone_verdict,
        c_n_estimate,
        f_n_estimate,
        limit_estimate,
        ends_bound,
        mu_estimate,
        brooks_bound: mu_estimate * mu_estimate / 4.0,
        mu_partial,
        miranda_rhs,
        miranda_verdict,
        gap_flag: c_n_estimate > omega + GAP_MARGIN,
        truncated,
    })
}

/// `V(ε)/(ω_n εⁿ)` for each `ε`; tends to the local sheet count at an on-surface
/// base.
pub fn small_radius_limit(
    imm: &Immersion,
    base: &BasePoint,
    eps: &[f64],
    level: u32,
) -> Result<Vec<f64>> {
    let n = imm.dim();
    let omega = unit_ball_volume(n);
    eps.iter()
        .map(|&e| {
            if !(e > 0.0) {
                return Err(Error::InvalidSpec(format!("radius {e} must be positive")));
            }
            Ok(extrinsic_ball_volume(imm, base, e, level)?.volume / (omega * e.powi(n as i32)))
        })
        .collect()
}
