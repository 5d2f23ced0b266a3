use std::path::{Path, PathBuf};

use minlap::geometry::{BasePoint, Immersion};
use minlap::pohozaev::AmbientFunction;
use minlap::surfaces::SurfaceSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseChoice {
    /// The ambient origin.
    Origin,
    /// The surface point at the surface's reference chart point.
    OnSurface,
}

impl BaseChoice {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "origin" => Ok(Self::Origin),
            "on-surface" => Ok(Self::OnSurface),
            other => Err(CliError::Config(format!(
                "unknown base '{other}' (origin|on-surface)"
            ))),
        }
    }

    pub fn resolve(self, spec: &SurfaceSpec, imm: &Immersion) -> BasePoint {
        match self {
            Self::Origin => BasePoint::origin(imm.ambient_dim()),
            Self::OnSurface => BasePoint::on_surface(imm, &spec.reference_point()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub radii: Vec<f64>,
    /// Mesh resolution passed to the ball mesher.
    pub resolution: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            radii: vec![5.0, 10.0, 20.0, 40.0],
            resolution: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditConfig {
    pub per_axis: usize,
    pub shells: Vec<f64>,
    /// Sampling lines per chart axis for the `ξ` bands.
    pub xi_lines: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            per_axis: 201,
            shells: vec![2.0, 10.0, 100.0, 1000.0],
            xi_lines: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeylSettings {
    /// Upper volume constant; estimated from the volume report when unset.
    pub c_n: Option<f64>,
    /// Lower volume constant; estimated from the volume report when unset.
    pub f_n: Option<f64>,
    pub alpha_shape: f64,
    pub lambda: f64,
    pub xi: f64,
    pub m_max: usize,
    pub d0: f64,
    pub e: f64,
    pub level: u32,
}

impl Default for WeylSettings {
    fn default() -> Self {
        Self {
            c_n: None,
            f_n: None,
            alpha_shape: 2.0,
            lambda: 1.0,
            xi: 0.0,
            m_max: 6,
            d0: minlap::weyl::DEFAULT_D0,
            e: minlap::weyl::DEFAULT_E,
            level: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PohozaevConfig {
    /// Extrinsic ball for the identity check.
    pub radius: f64,
    pub lambda: f64,
    /// Test function; a unit gaussian at the base point when unset.
    pub function: Option<AmbientFunction>,
    /// Uniform quadrature levels for the refinement study.
    pub levels: Vec<u32>,
    /// Ball radii for the hypothesis audit.
    pub audit_radii: Vec<f64>,
    pub per_axis: usize,
    pub audit_level: u32,
}

impl Default for PohozaevConfig {
    fn default() -> Self {
        Self {
            radius: 3.0,
            lambda: 1.0,
            function: None,
            levels: vec![0, 1, 2, 3, 4],
            audit_radii: vec![1.0, 2.0, 4.0, 8.0],
            per_axis: 41,
            audit_level: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BdggConfig {
    pub m: usize,
    pub radius: f64,
    pub resolution: usize,
    /// Exponent inside the range; the midpoint when unset.
    pub lambda: Option<f64>,
    pub b: f64,
    pub d: f64,
    pub shells: Vec<f64>,
}

impl Default for BdggConfig {
    fn default() -> Self {
        Self {
            m: 4,
            radius: 5.0,
            resolution: 24,
            lambda: None,
            b: minlap::bdgg::DEFAULT_B,
            d: minlap::bdgg::DEFAULT_D,
            shells: vec![0.0, 10.0, 20.0, 40.0, 80.0, 160.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    pub base: BaseChoice,
    /// Radii for the volume report.
    pub radii: Vec<f64>,
    pub quadrature_level: u32,
    pub spectrum: SpectrumConfig,
    pub audit: AuditConfig,
    pub weyl: WeylSettings,
    pub pohozaev: PohozaevConfig,
    pub bdgg: BdggConfig,
    pub out: PathBuf,
    /// Write OFF meshes of the spectrum balls.
    pub export_mesh: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            surface: SurfaceSpec::plane(2),
            base: BaseChoice::OnSurface,
            radii: vec![0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0],
            quadrature_level: 4,
            spectrum: SpectrumConfig::default(),
            audit: AuditConfig::default(),
            weyl: WeylSettings::default(),
            pohozaev: PohozaevConfig::default(),
            bdgg: BdggConfig::default(),
            out: PathBuf::from("out"),
            export_mesh: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        let ascending =
            |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]) && v.iter().all(|x| x.is_finite());
        if !ascending(&self.radii) || self.radii.first().is_some_and(|r| *r <= 0.0) {
            return Err(CliError::Config(
                "radii must be positive and strictly ascending".into(),
            ));
        }
        if !ascending(&self.spectrum.radii)
            || !ascending(&self.audit.shells)
            || !ascending(&self.pohozaev.audit_radii)
        {
            return Err(CliError::Config(
                "radius lists must be strictly ascending".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.weyl.xi) {
            return Err(CliError::Config(format!(
                "weyl.xi = {} must lie in [0, 1]",
                self.weyl.xi
            )));
        }
        if !(self.pohozaev.radius > 0.0 && self.bdgg.radius > 0.0) {
            return Err(CliError::Config("ball radii must be positive".into()));
        }
        if self.quadrature_level > 10 || self.weyl.level > 10 {
            return Err(CliError::Config(
                "quadrature levels above 10 are not supported".into(),
            ));
        }
        Ok(())
    }
}

/// Parses `a:b:k` into `k` evenly spaced values from `a` to `b`.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Config(format!("radii '{s}' must look like a:b:k"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, k] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.parse().map_err(|_| bad())?;
    let b: f64 = b.parse().map_err(|_| bad())?;
    let k: usize = k.parse().map_err(|_| bad())?;
    match k {
        0 => Err(bad()),
        1 => Ok(vec![a]),
        _ => Ok((0..k)
            .map(|i| a + (b - a) * i as f64 / (k - 1) as f64)
            .collect()),
    }
}
