//! Catalog of concrete hypersurfaces: planes, graphs, the catenoid and the
//! helicoid.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{point_frame, ChartDomain, ChartMap, Immersion, Jet};

/// Default chart radius for planes and entire graphs.
pub const DEFAULT_GRAPH_RADIUS: f64 = 1000.0;
pub const DEFAULT_CATENOID_T_MAX: f64 = 10.0;
pub const DEFAULT_HELICOID_S_MAX: f64 = 20.0;
pub const DEFAULT_HELICOID_THETA_MAX: f64 = 4.0 * PI;
/// Scherk's graph lives on the open square `|x|, |y| < π/2`; the chart stops
/// this far short of its edges.
pub const SCHERK_MARGIN: f64 = 1e-3;

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A user-supplied graph function `f: Rⁿ → R` with gradient and Hessian.
#[derive(Clone)]
pub struct GraphFunctionSpec {
    pub n: usize,
    pub label: String,
    /// Whether `f` solves the minimal surface equation.
    pub minimal: bool,
    pub f: ScalarFn,
    pub df: VectorFn,
    /// Row-major `n × n` Hessian.
    pub d2f: VectorFn,
}

impl GraphFunctionSpec {
    pub fn new<F, G, H>(
        n: usize,
        label: impl Into<String>,
        minimal: bool,
        f: F,
        df: G,
        d2f: H,
    ) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        H: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            n,
            label: label.into(),
            minimal,
            f: Arc::new(f),
            df: Arc::new(df),
            d2f: Arc::new(d2f),
        }
    }
}

impl fmt::Debug for GraphFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphFunctionSpec")
            .field("n", &self.n)
            .field("label", &self.label)
            .field("minimal", &self.minimal)
            .finish_non_exhaustive()
    }
}

impl PartialEq for GraphFunctionSpec {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.label == other.label && Arc::ptr_eq(&self.f, &other.f)
    }
}

/// Named graph families expressible in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphFamily {
    /// `f(q) = ⟨coeffs, q⟩ + offset`; minimal.
    Linear { coeffs: Vec<f64>, offset: f64 },
    /// `f(q) = coeff·q₁²`; not minimal.
    Quadratic { n: usize, coeff: f64 },
    /// `f(q) = coeff·q₁³`; not minimal.
    Cubic { n: usize, coeff: f64 },
    /// Scherk's surface `f = log(cos y / cos x)` on its square; minimal, n = 2.
    Scherk,
}

impl GraphFamily {
    pub fn dim(&self) -> usize {
        match self {
            Self::Linear { coeffs, .. } => coeffs.len(),
            Self::Quadratic { n, .. } | Self::Cubic { n, .. } => *n,
            Self::Scherk => 2,
        }
    }

    pub fn is_minimal(&self) -> bool {
        matches!(self, Self::Linear { .. } | Self::Scherk)
    }

    pub fn to_function(&self) -> GraphFunctionSpec {
        let n = self.dim();
        match self.clone() {
            Self::Linear { coeffs, offset } => {
                let a = coeffs.clone();
                let b = coeffs.clone();
                GraphFunctionSpec::new(
                    n,
                    format!("linear{coeffs:?}+{offset}"),
                    true,
                    move |q| a.iter().zip(q).map(|(c, x)| c * x).sum::<f64>() + offset,
                    move |_| b.clone(),
                    move |_| vec![0.0; n * n],
                )
            }
            Self::Quadratic { coeff, .. } => GraphFunctionSpec::new(
                n,
                format!("{coeff}*q1^2"),
                false,
                move |q| coeff * q[0] * q[0],
                move |q| {
                    let mut g = vec![0.0; n];
                    g[0] = 2.0 * coeff * q[0];
                    g
                },
                move |_| {
                    let mut h = vec![0.0; n * n];
                    h[0] = 2.0 * coeff;
                    h
                },
            ),
            Self::Cubic { coeff, .. } => GraphFunctionSpec::new(
                n,
                format!("{coeff}*q1^3"),
                false,
                move |q| coeff * q[0].powi(3),
                move |q| {
                    let mut g = vec![0.0; n];
                    g[0] = 3.0 * coeff * q[0] * q[0];
                    g
                },
                move |q| {
                    let mut h = vec![0.0; n * n];
                    h[0] = 6.0 * coeff * q[0];
                    h
                },
            ),
            Self::Scherk => GraphFunctionSpec::new(
                2,
                "scherk",
                true,
                |q| (q[1].cos() / q[0].cos()).ln(),
                |q| vec![q[0].tan(), -q[1].tan()],
                |q| {
                    let sx = 1.0 / q[0].cos();
                    let sy = 1.0 / q[1].cos();
                    vec![sx * sx, 0.0, 0.0, -sy * sy]
                },
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceKind {
    Plane {
        n: usize,
    },
    Graph {
        function: GraphFamily,
    },
    Catenoid {
        neck_radius: f64,
    },
    Helicoid {
        pitch: f64,
    },
    #[serde(skip)]
    CustomGraph(GraphFunctionSpec),
}

/// Parameter-domain bounds. Unset fields take per-kind defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    /// Chart radius for planes and graphs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Catenoid `|t| ≤ t_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Helicoid `|s| ≤ s_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_max: Option<f64>,
    /// Helicoid `|θ| ≤ theta_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    #[serde(flatten)]
    pub kind: SurfaceKind,
    #[serde(default)]
    pub truncation: Truncation,
}

impl SurfaceSpec {
    pub fn plane(n: usize) -> Self {
        Self::from_kind(SurfaceKind::Plane { n })
    }

    pub fn graph(function: GraphFamily) -> Self {
        Self::from_kind(SurfaceKind::Graph { function })
    }

    pub fn custom_graph(function: GraphFunctionSpec) -> Self {
        Self::from_kind(SurfaceKind::CustomGraph(function))
    }

    pub fn catenoid(neck_radius: f64) -> Self {
        Self::from_kind(SurfaceKind::Catenoid { neck_radius })
    }

    pub fn helicoid(pitch: f64) -> Self {
        Self::from_kind(SurfaceKind::Helicoid { pitch })
    }

    fn from_kind(kind: SurfaceKind) -> Self {
        Self {
            kind,
            truncation: Truncation::default(),
        }
    }

    pub fn with_radius(mut self, r: f64) -> Self {
        self.truncation.radius = Some(r);
        self
    }

    pub fn with_t_max(mut self, t: f64) -> Self {
        self.truncation.t_max = Some(t);
        self
    }

    /// Resolves a catalog name used on the command line.
    pub fn from_name(name: &str, n: usize) -> Result<Self> {
        let spec = match name {
            "plane" => Self::plane(n),
            "catenoid" => Self::catenoid(1.0),
            "helicoid" => Self::helicoid(1.0),
            "linear" => {
                let mut coeffs = vec![0.0; n];
                coeffs[0] = 1.0;
                Self::graph(GraphFamily::Linear {
                    coeffs,
                    offset: 0.0,
                })
            }
            "quadratic" => Self::graph(GraphFamily::Quadratic { n, coeff: 1.0 }),
            "cubic" => Self::graph(GraphFamily::Cubic { n, coeff: 1.0 }),
            "scherk" => Self::graph(GraphFamily::Scherk),
            other => return Err(Error::UnsupportedKind(other.to_string())),
        };
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            SurfaceKind::Plane { n } => *n,
            SurfaceKind::Graph { function } => function.dim(),
            SurfaceKind::CustomGraph(g) => g.n,
            SurfaceKind::Catenoid { .. } | SurfaceKind::Helicoid { .. } => 2,
        }
    }

    pub fn is_minimal(&self) -> bool {
        match &self.kind {
            SurfaceKind::Graph { function } => function.is_minimal(),
            SurfaceKind::CustomGraph(g) => g.minimal,
            _ => true,
        }
    }

    pub fn is_graph(&self) -> bool {
        matches!(
            self.kind,
            SurfaceKind::Plane { .. } | SurfaceKind::Graph { .. } | SurfaceKind::CustomGraph(_)
        )
    }

    pub fn label(&self) -> String {
        match &self.kind {
            SurfaceKind::Plane { n } => format!("plane{n}"),
            SurfaceKind::Graph { function } => format!("graph:{}", function.to_function().label),
            SurfaceKind::CustomGraph(g) => format!("graph:{}", g.label),
            SurfaceKind::Catenoid { neck_radius } => format!("catenoid({neck_radius})"),
            SurfaceKind::Helicoid { pitch } => format!("helicoid({pitch})"),
        }
    }

    /// A chart point at the "center" of the surface (graph origin, catenoid
    /// neck at `θ = 0`, helicoid axis).
    pub fn reference_point(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    /// Graph function for graph-type specs.
    pub fn graph_function(&self) -> Option<GraphFunctionSpec> {
        match &self.kind {
            SurfaceKind::Plane { n } => Some(
                GraphFamily::Linear {
                    coeffs: vec![0.0; *n],
                    offset: 0.0,
                }
                .to_function(),
            ),
            SurfaceKind::Graph { function } => Some(function.to_function()),
            SurfaceKind::CustomGraph(g) => Some(g.clone()),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let t = &self.truncation;
        for (name, v) in [
            ("radius", t.radius),
            ("t_max", t.t_max),
            ("s_max", t.s_max),
            ("theta_max", t.theta_max),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "truncation {name} must be finite and positive"
                    )));
                }
            }
        }
        if self.dim() < 2 {
            return Err(Error::InvalidSpec(format!(
                "intrinsic dimension must be >= 2, got {}",
                self.dim()
            )));
        }
        match &self.kind {
            SurfaceKind::Catenoid { neck_radius }
                if !(neck_radius.is_finite() && *neck_radius > 0.0) =>
            {
                Err(Error::InvalidSpec(
                    "catenoid neck_radius must be positive".into(),
                ))
            }
            SurfaceKind::Helicoid { pitch } if !(pitch.is_finite() && *pitch > 0.0) => {
                Err(Error::InvalidSpec("helicoid pitch must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

struct GraphChart {
    g: GraphFunctionSpec,
}

impl ChartMap for GraphChart {
    fn point(&self, q: &[f64]) -> DVector<f64> {
        let n = q.len();
        let mut p = DVector::zeros(n + 1);
        p.rows_mut(0, n).copy_from_slice(q);
        p[n] = (self.g.f)(q);
        p
    }

    fn jet(&self, q: &[f64]) -> Jet {
        let n = q.len();
        let df = (self.g.df)(q);
        let d2f = (self.g.d2f)(q);
        let mut jacobian = DMatrix::zeros(n + 1, n);
        for i in 0..n {
            jacobian[(i, i)] = 1.0;
            jacobian[(n, i)] = df[i];
        }
        let second = d2f
            .iter()
            .map(|&h| {
                let mut v = DVector::zeros(n + 1);
                v[n] = h;
                v
            })
            .collect();
        Jet {
            point: self.point(q),
            jacobian,
            second,
        }
    }
}

struct CatenoidChart {
    c: f64,
}

impl ChartMap for CatenoidChart {
    fn point(&self, q: &[f64]) -> DVector<f64> {
        let (t, th) = (q[0], q[1]);
        let r = self.c * (t / self.c).cosh();
        DVector::from_vec(vec![r * th.cos(), r * th.sin(), t])
    }

    fn jet(&self, q: &[f64]) -> Jet {
        let c = self.c;
        let (t, th) = (q[0], q[1]);
        let (ch, sh) = ((t / c).cosh(), (t / c).sinh());
        let (cs, sn) = (th.cos(), th.sin());
        let jacobian = DMatrix::from_row_slice(
            3,
            2,
            &[sh * cs, -c * ch * sn, sh * sn, c * ch * cs, 1.0, 0.0],
        );
        let tt = DVector::from_vec(vec![ch / c * cs, ch / c * sn, 0.0]);
        let tth = DVector::from_vec(vec![-sh * sn, sh * cs, 0.0]);
        let thth = DVector::from_vec(vec![-c * ch * cs, -c * ch * sn, 0.0]);
        Jet {
            point: self.point(q),
            jacobian,
            second: vec![tt, tth.clone(), tth, thth],
        }
    }
}

struct PolarDiskChart;

impl ChartMap for PolarDiskChart {
    fn point(&self, q: &[f64]) -> DVector<f64> {
        DVector::from_vec(vec![q[0] * q[1].cos(), q[0] * q[1].sin(), 0.0])
    }

    fn jet(&self, q: &[f64]) -> Jet {
        let (rho, (sn, cs)) = (q[0], q[1].sin_cos());
        let jacobian = DMatrix::from_row_slice(3, 2, &[cs, -rho * sn, sn, rho * cs, 0.0, 0.0]);
        let rth = DVector::from_vec(vec![-sn, cs, 0.0]);
        Jet {
            point: self.point(q),
            jacobian,
            second: vec![
                DVector::zeros(3),
                rth.clone(),
                rth,
                DVector::from_vec(vec![-rho * cs, -rho * sn, 0.0]),
            ],
        }
    }
}

/// The flat disk `{|y| ≤ radius} × {0} ⊂ R³` in polar coordinates `(ρ, φ)`.
/// The chart degenerates at `ρ = 0`; use it with chart-rectangle regions so
/// the disk is integrated exactly rather than as a clipped polygon.
pub fn polar_disk(radius: f64) -> Immersion {
    let domain = ChartDomain::Rectangle {
        lo: vec![0.0, -PI],
        hi: vec![radius, PI],
        periodic: vec![false, true],
    };
    Immersion::new(
        2,
        domain,
        Arc::new(PolarDiskChart),
        true,
        format!("polar disk({radius})"),
    )
}

struct HelicoidChart {
    pitch: f64,
}

impl ChartMap for HelicoidChart {
    fn point(&self, q: &[f64]) -> DVector<f64> {
        let (s, th) = (q[0], q[1]);
        DVector::from_vec(vec![s * th.cos(), s * th.sin(), self.pitch * th])
    }

    fn jet(&self, q: &[f64]) -> Jet {
        let (s, th) = (q[0], q[1]);
        let (cs, sn) = (th.cos(), th.sin());
        let jacobian = DMatrix::from_row_slice(3, 2, &[cs, -s * sn, sn, s * cs, 0.0, self.pitch]);
        let mixed = DVector::from_vec(vec![-sn, cs, 0.0]);
        let thth = DVector::from_vec(vec![-s * cs, -s * sn, 0.0]);
        Jet {
            point: self.point(q),
            jacobian,
            second: vec![DVector::zeros(3), mixed.clone(), mixed, thth],
        }
    }
}

/// Builds the analytic immersion of a catalog surface.
pub fn make_immersion(spec: &SurfaceSpec) -> Result<Immersion> {
    spec.validate()?;
    let label = spec.label();
    let t = &spec.truncation;
    let imm = match &spec.kind {
        SurfaceKind::Catenoid { neck_radius } => {
            let t_max = t.t_max.unwrap_or(DEFAULT_CATENOID_T_MAX);
            let domain = ChartDomain::Rectangle {
                lo: vec![-t_max, -PI],
                hi: vec![t_max, PI],
                periodic: vec![false, true],
            };
            Immersion::new(
                2,
                domain,
                Arc::new(CatenoidChart { c: *neck_radius }),
                true,
                label,
            )
        }
        SurfaceKind::Helicoid { pitch } => {
            let s_max = t.s_max.unwrap_or(DEFAULT_HELICOID_S_MAX);
            let th_max = t.theta_max.unwrap_or(DEFAULT_HELICOID_THETA_MAX);
            let domain = ChartDomain::rectangle(vec![-s_max, -th_max], vec![s_max, th_max]);
            Immersion::new(
                2,
                domain,
                Arc::new(HelicoidChart { pitch: *pitch }),
                true,
                label,
            )
        }
        SurfaceKind::Graph {
            function: GraphFamily::Scherk,
        } => {
            let h = t
                .radius
                .unwrap_or(f64::INFINITY)
                .min(PI / 2.0 - SCHERK_MARGIN);
            let domain = ChartDomain::cube(2, h);
            let g = GraphFamily::Scherk.to_function();
            Immersion::new(2, domain, Arc::new(GraphChart { g }), true, label)
        }
        _ => {
            let g = spec.graph_function().expect("graph-type surface");
            let n = g.n;
            let radius = t.radius.unwrap_or(DEFAULT_GRAPH_RADIUS);
            let domain = ChartDomain::disk(vec![0.0; n], radius);
            Immersion::new(n, domain, Arc::new(GraphChart { g }), true, label)
        }
    };
    Ok(imm)
}

/// Largest `|H|` over the samples. For graphs `H` comes from the divergence
/// form `div(Df/√(1+|Df|²))/n`; for other kinds from the point frame.
pub fn minimality_residual(spec: &SurfaceSpec, samples: &[Vec<f64>]) -> Result<f64> {
    if let Some(g) = spec.graph_function() {
        let n = g.n as f64;
        let worst = samples
            .iter()
            .map(|q| {
                let df = (g.df)(q);
                let d2f = (g.d2f)(q);
                let k = df.len();
                let w2 = 1.0 + df.iter().map(|x| x * x).sum::<f64>();
                let lap: f64 = (0..k).map(|i| d2f[i * k + i]).sum();
                let mut quad = 0.0;
                for i in 0..k {
                    for j in 0..k {
                        quad += df[i] * d2f[i * k + j] * df[j];
                    }
                }
                ((lap - quad / w2) / w2.sqrt()).abs() / n
            })
            .fold(0.0, f64::max);
        return Ok(worst);
    }
    let imm = make_immersion(spec)?;
    let mut worst = 0.0_f64;
    for q in samples {
        worst = worst.max(point_frame(&imm, q)?.mean_curvature.abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatenoidInequalityRow {
    pub t: f64,
    /// `sinh t cosh t − t`.
    pub first_gap: f64,
    /// `t cosh t − sinh t`.
    pub second_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatenoidInequalities {
    pub rows: Vec<CatenoidInequalityRow>,
    /// Both gaps are positive at every `t > 0`.
    pub strict_for_positive_t: bool,
    /// Both gaps vanish at every `t = 0` in the grid.
    pub equality_at_zero: bool,
}

/// Checks `t ≤ sinh t cosh t` and `sinh t ≤ t cosh t` on a grid of `t ≥ 0`.
pub fn catenoid_inequalities(t_grid: &[f64]) -> Result<CatenoidInequalities> {
    if let Some(t) = t_grid.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "catenoid inequality grid needs t >= 0, got {t}"
        )));
    }
    let rows: Vec<_> = t_grid
        .iter()
        .map(|&t| CatenoidInequalityRow {
            t,
            first_gap: t.sinh() * t.cosh() - t,
            second_gap: t * t.cosh() - t.sinh(),
        })
        .collect();
    let strict = rows
        .iter()
        .filter(|r| r.t > 0.0)
        .all(|r| r.first_gap > 0.0 && r.second_gap > 0.0);
    let equality = rows
        .iter()
        .filter(|r| r.t == 0.0)
        .all(|r| r.first_gap == 0.0 && r.second_gap == 0.0);
    Ok(CatenoidInequalities {
        rows,
        strict_for_positive_t: strict,
        equality_at_zero: equality,
    })
}
