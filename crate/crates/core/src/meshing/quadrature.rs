//! Chart-cell quadrature over extrinsic balls, annuli and chart rectangles.
//!
//! The region's chart preimage is located by a Lipschitz-certified cell scan,
//! covered by a grid of base cells, and refined recursively where the sphere
//! `{r̃ = c}` may cross a cell. Leaf cells are split into two triangles and
//! clipped against the linear interpolant of `r̃`, which turns the region into
//! an exact polygonal domain `D_h`. Boundary integrals run over the clipped
//! edges of `D_h`, so the divergence theorem holds on `D_h` up to the error of
//! the fixed-order rules alone.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BasePoint, ChartDomain, Immersion};

/// Safety factor on the sampled cell diameter used as a Lipschitz radius.
const LIPSCHITZ_SAFETY: f64 = 1.25;
const SCAN_GRID: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Base cells per chart axis over the region's bounding box.
    pub base_cells: usize,
    /// Cells fully inside the region are refined at least to this depth.
    pub min_depth: u32,
    /// Cells cut by the region boundary are refined to this depth.
    pub max_depth: u32,
}

impl QuadratureOptions {
    /// Adaptive refinement of cut cells only.
    pub fn adaptive(level: u32) -> Self {
        Self {
            base_cells: 64,
            min_depth: 0,
            max_depth: level,
        }
    }

    /// Every cell refined to `level` on a 4×4 base grid.
    pub fn uniform(level: u32) -> Self {
        Self {
            base_cells: 4,
            min_depth: level,
            max_depth: level,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Ball {
        base: BasePoint,
        radius: f64,
    },
    Annulus {
        base: BasePoint,
        inner: f64,
        outer: f64,
    },
    ChartRectangle {
        lo: [f64; 2],
        hi: [f64; 2],
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<const K: usize> {
    pub domain: [f64; K],
    pub boundary: [f64; K],
    /// The region may touch the chart truncation.
    pub truncated: bool,
    /// Leaf cells integrated.
    pub cells: usize,
}

impl<const K: usize> Integral<K> {
    fn empty(truncated: bool) -> Self {
        Self {
            domain: [0.0; K],
            boundary: [0.0; K],
            truncated,
            cells: 0,
        }
    }
}

// Gauss–Legendre 3-point rule on [0, 1].
const G3_X: [f64; 3] = [0.112_701_665_379_258_31, 0.5, 0.887_298_334_620_741_7];
const G3_W: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

// Degree-4 six-point triangle rule (barycentric coordinates, weights sum to 1).
const T6: [([f64; 3], f64); 6] = [
    (
        [
            0.108_103_018_168_070,
            0.445_948_490_915_965,
            0.445_948_490_915_965,
        ],
        0.223_381_589_678_011,
    ),
    (
        [
            0.445_948_490_915_965,
            0.108_103_018_168_070,
            0.445_948_490_915_965,
        ],
        0.223_381_589_678_011,
    ),
    (
        [
            0.445_948_490_915_965,
            0.445_948_490_915_965,
            0.108_103_018_168_070,
        ],
        0.223_381_589_678_011,
    ),
    (
        [
            0.816_847_572_980_459,
            0.091_576_213_509_771,
            0.091_576_213_509_771,
        ],
        0.109_951_743_655_322,
    ),
    (
        [
            0.091_576_213_509_771,
            0.816_847_572_980_459,
            0.091_576_213_509_771,
        ],
        0.109_951_743_655_322,
    ),
    (
        [
            0.091_576_213_509_771,
            0.091_576_213_509_771,
            0.816_847_572_980_459,
        ],
        0.109_951_743_655_322,
    ),
];

fn add<const K: usize>(acc: &mut [f64; K], v: [f64; K], w: f64) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += w * b;
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Class {
    Outside,
    Inside,
    Uncertain,
}

struct Sample {
    q: [[f64; 2]; 9],
    r: [f64; 9],
    class: Class,
}

struct Probe<'a> {
    imm: &'a Immersion,
    a: Vec<f64>,
    lo_r: f64,
    hi_r: f64,
    dom_lo: [f64; 2],
    dom_hi: [f64; 2],
    periodic: [bool; 2],
    disk: Option<([f64; 2], f64)>,
}

impl<'a> Probe<'a> {
    fn new(imm: &'a Immersion, base: &BasePoint, lo_r: f64, hi_r: f64) -> Self {
        let (lo, hi) = imm.domain().bounds();
        let disk = match imm.domain() {
            ChartDomain::Disk { center, radius } => Some(([center[0], center[1]], *radius)),
            ChartDomain::Rectangle { .. } => None,
        };
        Self {
            imm,
            a: base.ambient_point.clone(),
            lo_r,
            hi_r,
            dom_lo: [lo[0], lo[1]],
            dom_hi: [hi[0], hi[1]],
            periodic: [imm.domain().is_periodic(0), imm.domain().is_periodic(1)],
            disk,
        }
    }

    fn sample(&self, lo: [f64; 2], hi: [f64; 2]) -> Sample {
        let mut q = [[0.0; 2]; 9];
        let mut pts = [[0.0; 3]; 9];
        let mut r = [0.0; 9];
        for j in 0..3 {
            for i in 0..3 {
                let k = 3 * j + i;
                q[k] = [
                    lo[0] + (hi[0] - lo[0]) * 0.5 * i as f64,
                    lo[1] + (hi[1] - lo[1]) * 0.5 * j as f64,
                ];
                let p = self.imm.point(&q[k]);
                let mut d2 = 0.0;
                for (m, (x, y)) in p.iter().zip(&self.a).enumerate() {
                    if m < 3 {
                        pts[k][m] = *x;
                    }
                    d2 += (x - y) * (x - y);
                }
                r[k] = d2.sqrt();
            }
        }
        let c = pts[4];
        let spread = pts
            .iter()
            .map(|p| ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2)).sqrt())
            .fold(0.0, f64::max);
        let rho = LIPSCHITZ_SAFETY * spread;
        let rc = r[4];
        let class = if rc - rho > self.hi_r || rc + rho < self.lo_r {
            Class::Outside
        } else if rc + rho <= self.hi_r && rc - rho >= self.lo_r {
            Class::Inside
        } else {
            Class::Uncertain
        };
        Sample { q, r, class }
    }

    fn in_band(&self, r: f64) -> bool {
        r <= self.hi_r && r >= self.lo_r
    }

    fn outside_chart(&self, q: &[f64; 2]) -> bool {
        if let Some((c, rad)) = self.disk {
            let d = ((q[0] - c[0]).powi(2) + (q[1] - c[1]).powi(2)).sqrt();
            return d > rad * (1.0 + 1e-12);
        }
        false
    }

    fn on_chart_edge(&self, q: &[f64; 2]) -> bool {
        (0..2).any(|k| {
            !self.periodic[k] && {
                let tol = 1e-12 * (1.0 + self.dom_hi[k].abs().max(self.dom_lo[k].abs()));
                (q[k] - self.dom_lo[k]).abs() <= tol || (q[k] - self.dom_hi[k]).abs() <= tol
            }
        })
    }

    fn cell_misses_disk(&self, lo: [f64; 2], hi: [f64; 2]) -> bool {
        match self.disk {
            Some((c, rad)) => {
                let dx = (c[0] - c[0].clamp(lo[0], hi[0])).abs();
                let dy = (c[1] - c[1].clamp(lo[1], hi[1])).abs();
                (dx * dx + dy * dy).sqrt() > rad
            }
            None => false,
        }
    }

    /// Returns whether the cell touches the chart truncation; errors if a
    /// sampled truncation point provably lies in the region.
    fn check_truncation(&self, s: &Sample) -> Result<bool> {
        let mut touches = false;
        for (q, &r) in s.q.iter().zip(&s.r) {
            if self.outside_chart(q) || self.on_chart_edge(q) {
                touches = true;
                if self.in_band(r) {
                    return Err(Error::TruncationTooSmall { radius: self.hi_r });
                }
            }
        }
        Ok(touches)
    }
}

struct Scan {
    lo: [f64; 2],
    hi: [f64; 2],
    found: bool,
    truncated: bool,
}

impl Scan {
    fn include(&mut self, lo: [f64; 2], hi: [f64; 2]) {
        for k in 0..2 {
            self.lo[k] = self.lo[k].min(lo[k]);
            self.hi[k] = self.hi[k].max(hi[k]);
        }
        self.found = true;
    }
}

fn scan_cell(
    p: &Probe,
    lo: [f64; 2],
    hi: [f64; 2],
    depth: u32,
    max_depth: u32,
    acc: &mut Scan,
) -> Result<()> {
    if p.cell_misses_disk(lo, hi) {
        return Ok(());
    }
    let s = p.sample(lo, hi);
    if s.class == Class::Outside {
        return Ok(());
    }
    if s.class == Class::Inside || depth == max_depth {
        if p.check_truncation(&s)? {
            acc.truncated = true;
        }
        acc.include(lo, hi);
        return Ok(());
    }
    let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    for (a, b) in quadrants(lo, mid, hi) {
        scan_cell(p, a, b, depth + 1, max_depth, acc)?;
    }
    Ok(())
}

fn quadrants(lo: [f64; 2], mid: [f64; 2], hi: [f64; 2]) -> [([f64; 2], [f64; 2]); 4] {
    [
        (lo, mid),
        ([mid[0], lo[1]], [hi[0], mid[1]]),
        ([lo[0], mid[1]], [mid[0], hi[1]]),
        (mid, hi),
    ]
}

fn scan_box(p: &Probe, lo: [f64; 2], hi: [f64; 2], max_depth: u32) -> Result<(Scan, [f64; 2])> {
    let mut acc = Scan {
        lo: [f64::INFINITY; 2],
        hi: [f64::NEG_INFINITY; 2],
        found: false,
        truncated: false,
    };
    let n = SCAN_GRID;
    let w = [(hi[0] - lo[0]) / n as f64, (hi[1] - lo[1]) / n as f64];
    for j in 0..n {
        for i in 0..n {
            let a = [lo[0] + w[0] * i as f64, lo[1] + w[1] * j as f64];
            let b = [
                if i + 1 == n {
                    hi[0]
                } else {
                    lo[0] + w[0] * (i + 1) as f64
                },
                if j + 1 == n {
                    hi[1]
                } else {
                    lo[1] + w[1] * (j + 1) as f64
                },
            ];
            scan_cell(p, a, b, 0, max_depth, &mut acc)?;
        }
    }
    let leaf = [
        w[0] / f64::from(1u32 << max_depth),
        w[1] / f64::from(1u32 << max_depth),
    ];
    Ok((acc, leaf))
}

/// Bounding box of the region's chart preimage, or `None` when empty.
fn locate(p: &Probe) -> Result<Option<([f64; 2], [f64; 2], bool)>> {
    let pad_clip = |scan: &Scan, leaf: [f64; 2]| {
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        for k in 0..2 {
            lo[k] = (scan.lo[k] - leaf[k]).max(p.dom_lo[k]);
            hi[k] = (scan.hi[k] + leaf[k]).min(p.dom_hi[k]);
        }
        (lo, hi)
    };
    let (first, leaf) = scan_box(p, p.dom_lo, p.dom_hi, 7)?;
    if !first.found {
        return Ok(None);
    }
    let (lo, hi) = pad_clip(&first, leaf);
    let (second, leaf) = scan_box(p, lo, hi, 5)?;
    if !second.found {
        return Ok(None);
    }
    let (lo, hi) = pad_clip(&second, leaf);
    Ok(Some((lo, hi, first.truncated || second.truncated)))
}

#[derive(Clone, Copy)]
struct PolyVertex {
    q: [f64; 2],
    r: f64,
    /// The edge leaving this vertex lies on a clipping sphere.
    cut: bool,
}

/// Point where the linear interpolant of `r̃` on segment `PQ` equals `level`,
/// computed from the lexicographically smaller endpoint so neighbouring cells
/// agree bitwise.
fn crossing(p: &PolyVertex, q: &PolyVertex, level: f64) -> [f64; 2] {
    let (a, b) = if (p.q[0], p.q[1]) <= (q.q[0], q.q[1]) {
        (p, q)
    } else {
        (q, p)
    };
    let t = (level - a.r) / (b.r - a.r);
    [
        a.q[0] + t * (b.q[0] - a.q[0]),
        a.q[1] + t * (b.q[1] - a.q[1]),
    ]
}

/// Sutherland–Hodgman clip of a convex polygon to `sign·(r − level) ≤ 0`.
fn clip(poly: &[PolyVertex], level: f64, sign: f64) -> Vec<PolyVertex> {
    let inside = |v: &PolyVertex| sign * (v.r - level) <= 0.0;
    let mut out = Vec::with_capacity(poly.len() + 2);
    for i in 0..poly.len() {
        let p = &poly[i];
        let q = &poly[(i + 1) % poly.len()];
        match (inside(p), inside(q)) {
            (true, true) => out.push(*p),
            (true, false) => {
                out.push(*p);
                out.push(PolyVertex {
                    q: crossing(p, q, level),
                    r: level,
                    cut: true,
                });
            }
            (false, true) => out.push(PolyVertex {
                q: crossing(p, q, level),
                r: level,
                cut: p.cut,
            }),
            (false, false) => {}
        }
    }
    out
}

struct Integrator<'a, const K: usize, D, B> {
    probe: Probe<'a>,
    opts: QuadratureOptions,
    density: &'a D,
    boundary: &'a B,
}

impl<const K: usize, D, B> Integrator<'_, K, D, B>
where
    D: Fn(&[f64; 2]) -> [f64; K] + Sync,
    B: Fn(&[f64; 2], &[f64; 2]) -> [f64; K] + Sync,
{
    fn full_cell(&self, lo: [f64; 2], hi: [f64; 2], acc: &mut [f64; K]) {
        let w = [hi[0] - lo[0], hi[1] - lo[1]];
        for (y, wy) in G3_X.iter().zip(G3_W) {
            for (x, wx) in G3_X.iter().zip(G3_W) {
                let q = [lo[0] + w[0] * x, lo[1] + w[1] * y];
                add(acc, (self.density)(&q), wx * wy * w[0] * w[1]);
            }
        }
    }

    fn segment(&self, a: [f64; 2], b: [f64; 2], acc: &mut [f64; K]) {
        let tau = [b[0] - a[0], b[1] - a[1]];
        for (t, w) in G3_X.iter().zip(G3_W) {
            let q = [a[0] + t * tau[0], a[1] + t * tau[1]];
            add(acc, (self.boundary)(&q, &tau), w);
        }
    }

    fn polygon(&self, poly: &[PolyVertex], dom: &mut [f64; K], bnd: &mut [f64; K]) {
        if poly.len() < 3 {
            return;
        }
        let v0 = poly[0].q;
        for i in 1..poly.len() - 1 {
            let (v1, v2) = (poly[i].q, poly[i + 1].q);
            let area =
                0.5 * ((v1[0] - v0[0]) * (v2[1] - v0[1]) - (v2[0] - v0[0]) * (v1[1] - v0[1]));
            if area <= 0.0 {
                continue;
            }
            for (bary, w) in T6 {
                let q = [
                    bary[0] * v0[0] + bary[1] * v1[0] + bary[2] * v2[0],
                    bary[0] * v0[1] + bary[1] * v1[1] + bary[2] * v2[1],
                ];
                add(dom, (self.density)(&q), w * area);
            }
        }
        for i in 0..poly.len() {
            if poly[i].cut {
                self.segment(poly[i].q, poly[(i + 1) % poly.len()].q, bnd);
            }
        }
    }

    fn leaf(&self, s: &Sample, dom: &mut [f64; K], bnd: &mut [f64; K]) {
        let corner = |k: usize| PolyVertex {
            q: s.q[k],
            r: s.r[k],
            cut: false,
        };
        let (c0, c1, c2, c3) = (corner(0), corner(2), corner(8), corner(6));
        for tri in [[c0, c1, c2], [c0, c2, c3]] {
            let mut poly = clip(&tri, self.probe.hi_r, 1.0);
            if self.probe.lo_r > f64::NEG_INFINITY {
                poly = clip(&poly, self.probe.lo_r, -1.0);
            }
            self.polygon(&poly, dom, bnd);
        }
    }

    fn cell(&self, lo: [f64; 2], hi: [f64; 2], depth: u32, out: &mut ([f64; K], [f64; K], usize)) {
        let s = self.probe.sample(lo, hi);
        let refine = match s.class {
            Class::Outside => return,
            Class::Inside => depth < self.opts.min_depth,
            Class::Uncertain => depth < self.opts.max_depth,
        };
        if refine {
            let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
            for (a, b) in quadrants(lo, mid, hi) {
                self.cell(a, b, depth + 1, out);
            }
            return;
        }
        out.2 += 1;
        if s.class == Class::Inside {
            self.full_cell(lo, hi, &mut out.0);
        } else {
            self.leaf(&s, &mut out.0, &mut out.1);
        }
    }
}

fn base_grid(lo: [f64; 2], hi: [f64; 2], n: usize) -> Vec<([f64; 2], [f64; 2])> {
    let w = [(hi[0] - lo[0]) / n as f64, (hi[1] - lo[1]) / n as f64];
    let coord = |k: usize, i: usize| {
        if i == n {
            hi[k]
        } else {
            lo[k] + w[k] * i as f64
        }
    };
    (0..n * n)
        .map(|c| {
            let (i, j) = (c % n, c / n);
            (
                [coord(0, i), coord(1, j)],
                [coord(0, i + 1), coord(1, j + 1)],
            )
        })
        .collect()
}

fn sum_cells<const K: usize>(
    parts: Vec<([f64; K], [f64; K], usize)>,
) -> ([f64; K], [f64; K], usize) {
    let mut dom = [0.0; K];
    let mut bnd = [0.0; K];
    let mut cells = 0;
    for (d, b, c) in parts {
        add(&mut dom, d, 1.0);
        add(&mut bnd, b, 1.0);
        cells += c;
    }
    (dom, bnd, cells)
}

/// Integrates `density` (per unit chart area) over the region and
/// `boundary(q, τ)` along its boundary, where `τ = dq/dt` is the chart
/// tangent of a counterclockwise parametrization over `t ∈ [0, 1]`.
///
/// For a chart vector field `X` the outward flux density is
/// `√det g · (X¹τ² − X²τ¹)`.
pub fn integrate<const K: usize, D, B>(
    imm: &Immersion,
    region: &Region,
    opts: &QuadratureOptions,
    density: D,
    boundary: B,
) -> Result<Integral<K>>
where
    D: Fn(&[f64; 2]) -> [f64; K] + Sync,
    B: Fn(&[f64; 2], &[f64; 2]) -> [f64; K] + Sync,
{
    if imm.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            expected: 2,
            got: imm.dim(),
        });
    }
    if opts.base_cells == 0 || opts.min_depth > opts.max_depth || opts.max_depth > 20 {
        return Err(Error::InvalidSpec(format!(
            "invalid quadrature options {opts:?}"
        )));
    }
    let (base, lo_r, hi_r) = match region {
        Region::ChartRectangle { lo, hi } => {
            return integrate_rectangle(*lo, *hi, opts, &density, &boundary)
        }
        Region::Ball { base, radius } => (base, f64::NEG_INFINITY, *radius),
        Region::Annulus { base, inner, outer } => (base, *inner, *outer),
    };
    if !(hi_r > 0.0) || !(lo_r < hi_r) {
        return Err(Error::InvalidSpec(format!(
            "invalid extrinsic region radii ({lo_r}, {hi_r})"
        )));
    }
    let probe = Probe::new(imm, base, lo_r, hi_r);
    let Some((lo, hi, truncated)) = locate(&probe)? else {
        return Ok(Integral::empty(false));
    };
    let engine = Integrator {
        probe,
        opts: *opts,
        density: &density,
        boundary: &boundary,
    };
    let parts: Vec<_> = base_grid(lo, hi, opts.base_cells)
        .into_par_iter()
        .map(|(a, b)| {
            let mut out = ([0.0; K], [0.0; K], 0usize);
            engine.cell(a, b, 0, &mut out);
            out
        })
        .collect();
    let (domain, boundary, cells) = sum_cells(parts);
    Ok(Integral {
        domain,
        boundary,
        truncated,
        cells,
    })
}

fn integrate_rectangle<const K: usize, D, B>(
    lo: [f64; 2],
    hi: [f64; 2],
    opts: &QuadratureOptions,
    density: &D,
    boundary: &B,
) -> Result<Integral<K>>
where
    D: Fn(&[f64; 2]) -> [f64; K] + Sync,
    B: Fn(&[f64; 2], &[f64; 2]) -> [f64; K] + Sync,
{
    if !(hi[0] > lo[0] && hi[1] > lo[1]) {
        return Err(Error::InvalidSpec("empty chart rectangle".into()));
    }
    let n = opts.base_cells << opts.max_depth;
    let cells = base_grid(lo, hi, n);
    let parts: Vec<_> = cells
        .into_par_iter()
        .map(|(a, b)| {
            let mut dom = [0.0; K];
            let mut bnd = [0.0; K];
            let w = [b[0] - a[0], b[1] - a[1]];
            for (y, wy) in G3_X.iter().zip(G3_W) {
                for (x, wx) in G3_X.iter().zip(G3_W) {
                    let q = [a[0] + w[0] * x, a[1] + w[1] * y];
                    add(&mut dom, density(&q), wx * wy * w[0] * w[1]);
                }
            }
            let mut edge = |p: [f64; 2], e: [f64; 2]| {
                let tau = [e[0] - p[0], e[1] - p[1]];
                for (t, wt) in G3_X.iter().zip(G3_W) {
                    add(
                        &mut bnd,
                        boundary(&[p[0] + t * tau[0], p[1] + t * tau[1]], &tau),
                        wt,
                    );
                }
            };
            if a[1] == lo[1] {
                edge([a[0], a[1]], [b[0], a[1]]);
            }
            if b[0] == hi[0] {
                edge([b[0], a[1]], [b[0], b[1]]);
            }
            if b[1] == hi[1] {
                edge([b[0], b[1]], [a[0], b[1]]);
            }
            if a[0] == lo[0] {
                edge([a[0], b[1]], [a[0], a[1]]);
            }
            (dom, bnd, 1usize)
        })
        .collect();
    let (domain, boundary, cells) = sum_cells(parts);
    Ok(Integral {
        domain,
        boundary,
        truncated: false,
        cells,
    })
}

/// Chart bounding box `(lo, hi, truncated)` of `{lo_r ≤ r̃ ≤ hi_r}`, or `None`
/// when the surface misses the shell.
pub(crate) fn region_box(
    imm: &Immersion,
    base: &BasePoint,
    lo_r: f64,
    hi_r: f64,
) -> Result<Option<([f64; 2], [f64; 2], bool)>> {
    locate(&Probe::new(imm, base, lo_r, hi_r))
}

/// `√det g` at a chart point.
pub fn volume_density(imm: &Immersion, q: &[f64]) -> f64 {
    let jac = imm.jet(q).jacobian;
    (jac.transpose() * &jac).determinant().max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallVolume {
    pub volume: f64,
    pub truncated: bool,
}

/// `V_M(B̃_r ∩ M)` by adaptive clipped-cell quadrature at the given level.
pub fn extrinsic_ball_volume(
    imm: &Immersion,
    base: &BasePoint,
    r: f64,
    level: u32,
) -> Result<BallVolume> {
    region_volume(
        imm,
        &Region::Ball {
            base: base.clone(),
            radius: r,
        },
        &QuadratureOptions::adaptive(level),
    )
}

pub fn region_volume(
    imm: &Immersion,
    region: &Region,
    opts: &QuadratureOptions,
) -> Result<BallVolume> {
    let res = integrate(
        imm,
        region,
        opts,
        |q| [volume_density(imm, q)],
        |_, _| [0.0],
    )?;
    Ok(BallVolume {
        volume: res.domain[0],
        truncated: res.truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_rule_is_exact_for_quartics() {
        // ∫ x⁴ over the reference triangle = 1/30.
        let v: f64 = T6.iter().map(|(b, w)| w * 0.5 * b[1].powi(4)).sum();
        assert!((v - 1.0 / 30.0).abs() < 1e-12);
    }

    #[test]
    fn clip_keeps_cut_flags() {
        let v = |x: f64, y: f64, r: f64| PolyVertex {
            q: [x, y],
            r,
            cut: false,
        };
        let tri = [v(0.0, 0.0, 0.0), v(1.0, 0.0, 2.0), v(0.0, 1.0, 0.0)];
        let out = clip(&tri, 1.0, 1.0);
        assert_eq!(out.len(), 4);
        assert_eq!(out.iter().filter(|p| p.cut).count(), 1);
    }
}
