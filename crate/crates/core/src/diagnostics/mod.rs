//! Volume-growth, curvature-decay and normal-alignment audits.

mod curvature;
mod volume;
mod xi;

use crate::error::{Error, Result};

pub(crate) use curvature::chart_grid;
pub use curvature::{
    curvature_audit, graph_hessian_audit, CurvatureAudit, CurvatureBoundVerdict,
    CurvatureIntegralRow, CurvatureSample, CurvatureSampling, EqualitySet, FailReason,
    GraphHessianAudit, ShellTrend, Witness, XiBand, STRICT_MARGIN, SUP_TOL,
};
pub use volume::{small_radius_limit, volume_growth, VolumeGrowthReport, GAP_MARGIN, MONOTONE_TOL};
pub(crate) use xi::sphere_points;
pub use xi::{xi_estimate, ShellBand, XiReport, XI_TOL};

/// Cheng's comparison bound `(n−1)²c/4` on the bottom of the essential
/// spectrum when `Ricci → −(n−1)c`.
pub fn cheng_bound(c: f64, n: usize) -> Result<f64> {
    if c < 0.0 || c.is_nan() {
        return Err(Error::NegativeC(c));
    }
    let k = n.saturating_sub(1) as f64;
    Ok(k * k * c / 4.0)
}
