use minlap::bdgg::{normal_alignment_probe, params, solve_reduced_mse, SolverOptions};
use minlap::diagnostics::{
    curvature_audit, small_radius_limit, volume_growth, xi_estimate, CurvatureSampling,
};
use minlap::eigensolve::lambda1_curve;
use minlap::geometry::{BasePoint, Immersion};
use minlap::meshing::{ball_mesh, write_off, QuadratureOptions, Region};
use minlap::pohozaev::{
    absence_audit, identity_residual, AbsenceConfig, AbsenceVerdict, AmbientFunction,
};
use minlap::surfaces::make_immersion;
use minlap::weyl::{build_schedule, weyl_report, WeylConfig};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{BaseChoice, RunConfig};
use crate::error::Result;
use crate::report::{Table, Verdict};

/// Largest acceptable identity residual relative to `max(1, |lhs|)` at the
/// finest level.
const IDENTITY_TOL: f64 = 1e-4;
/// Antisymmetry and diagonal tolerance for the reduced BdGG solution.
const SYMMETRY_TOL: f64 = 1e-8;
const SMALL_RADII: [f64; 3] = [0.2, 0.1, 0.05];

/// Result of one subcommand before it is written out.
pub struct Section {
    pub payload: Value,
    pub verdicts: Vec<Verdict>,
    pub tables: Vec<Table>,
}

struct Setup {
    imm: Immersion,
    base: BasePoint,
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    let imm = make_immersion(&cfg.surface)?;
    let base = cfg.base.resolve(&cfg.surface, &imm);
    Ok(Setup { imm, base })
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

pub fn volume(cfg: &RunConfig) -> Result<Section> {
    let Setup { imm, base } = setup(cfg)?;
    let level = cfg.quadrature_level;
    let rep = volume_growth(&imm, &base, &cfg.radii, level)?;
    let resolution = format!("adaptive quadrature level {level}");
    let mut verdicts = vec![Verdict::new(
        "volume_monotone",
        "V(r)/r^n is nondecreasing in r",
        rep.monotone_verdict,
        &resolution,
    )];
    if cfg.surface.is_graph() && cfg.surface.is_minimal() {
        verdicts.push(Verdict::new(
            "miranda_bound",
            "V(r) <= ((n+1)^2/2) omega_{n+1} r^n on minimal graphs",
            rep.miranda_verdict,
            &resolution,
        ));
    }
    let small = if cfg.base == BaseChoice::OnSurface {
        let v = small_radius_limit(&imm, &base, &SMALL_RADII, level + 1)?;
        let ok = v.iter().all(|x| (1.0 - 1e-6..=1.02).contains(x))
            && v.windows(2).all(|w| w[1] <= w[0] + 1e-6);
        verdicts.push(Verdict::new(
            "small_radius_limit",
            "V(eps)/(omega_n eps^n) lies in [1, 1.02] and decreases toward 1 at an embedded base point",
            ok,
            format!("adaptive quadrature level {}", level + 1),
        ));
        Some(v)
    } else {
        None
    };
    let mut table = Table::new("volume", &["r", "V", "ratio", "miranda_rhs", "mu_partial"]);
    for i in 0..rep.radii.len() {
        table.push(vec![
            rep.radii[i].into(),
            rep.volumes[i].into(),
            rep.ratios[i].into(),
            rep.miranda_rhs[i].into(),
            rep.mu_partial[i].into(),
        ]);
    }
    Ok(Section {
        payload: json!({ "report": to_value(&rep)?, "small_radius": small, "small_radii": SMALL_RADII }),
        verdicts,
        tables: vec![table],
    })
}

pub fn spectrum(cfg: &RunConfig) -> Result<Section> {
    let Setup { imm, base } = setup(cfg)?;
    let sc = &cfg.spectrum;
    let curve = lambda1_curve(&imm, &base, &sc.radii, sc.resolution)?;
    let decreasing = curve.windows(2).all(|w| w[1].lambda1 < w[0].lambda1);
    let verdicts = vec![Verdict::new(
        "lambda1_decreasing",
        "lambda_1 of the extrinsic ball is strictly decreasing in r",
        decreasing,
        format!("ball mesh resolution {}", sc.resolution),
    )];
    let mut table = Table::new(
        "spectrum",
        &[
            "r",
            "lambda1",
            "lambda1_r2",
            "vertices",
            "max_edge",
            "residual",
        ],
    );
    for p in &curve {
        table.push(vec![
            p.r.into(),
            p.lambda1.into(),
            p.lambda1_r2.into(),
            p.vertices.into(),
            p.max_edge.into(),
            p.residual.into(),
        ]);
    }
    if cfg.export_mesh {
        for &r in &sc.radii {
            let mesh = ball_mesh(&imm, &base, r, sc.resolution)?;
            write_off(&mesh, &cfg.out.join(format!("mesh_r{r}.off")))?;
        }
    }
    Ok(Section {
        payload: json!({ "lambda1": to_value(&curve)? }),
        verdicts,
        tables: vec![table],
    })
}

pub fn weyl(cfg: &RunConfig) -> Result<Section> {
    let Setup { imm, base } = setup(cfg)?;
    let ws = &cfg.weyl;
    let (c_n, f_n, estimated) = match (ws.c_n, ws.f_n) {
        (Some(c), Some(f)) => (c, f, false),
        (c, f) => {
            let rep = volume_growth(&imm, &base, &cfg.radii, cfg.quadrature_level)?;
            (
                c.unwrap_or(rep.c_n_estimate),
                f.unwrap_or(rep.f_n_estimate),
                true,
            )
        }
    };
    let wc = WeylConfig {
        n: imm.dim(),
        c_n,
        f_n,
        alpha_shape: ws.alpha_shape,
        m_max: ws.m_max,
        lambda: ws.lambda,
        d0: ws.d0,
        e: ws.e,
    };
    let sched = build_schedule(&wc)?;
    let rep = weyl_report(&imm, &base, &sched, ws.xi, ws.level)?;
    let resolution = format!(
        "adaptive quadrature level {}, m = 1..{}",
        ws.level, ws.m_max
    );
    let verdicts = vec![
        Verdict::new(
            "weyl_mass",
            "eta ||psi||^2 >= tau - 1e-2 on every annulus",
            rep.mass_verdict,
            &resolution,
        ),
        Verdict::new(
            "weyl_bounds",
            "every residual term is below its analytic bound",
            rep.bound_verdict,
            &resolution,
        ),
        Verdict::new(
            "weyl_residual_decreasing",
            "residual ratio is nonincreasing in m",
            rep.monotone_verdict,
            &resolution,
        ),
    ];
    let mut table = Table::new(
        "weyl",
        &[
            "m",
            "eps",
            "C_m",
            "mass",
            "cutoff_term",
            "cutoff_bound",
            "laplacian_term",
            "laplacian_bound",
            "alignment_term",
            "alignment_bound",
            "residual_ratio",
        ],
    );
    for r in &rep.rows {
        table.push(vec![
            r.m.into(),
            r.eps.into(),
            r.c_m.into(),
            r.mass.into(),
            r.cutoff_term.into(),
            r.cutoff_bound.into(),
            r.laplacian_term.into(),
            r.laplacian_bound.into(),
            r.alignment_term.into(),
            r.alignment_bound.into(),
            r.residual_ratio.into(),
        ]);
    }
    Ok(Section {
        payload: json!({
            "volume_constants_estimated": estimated,
            "schedule": to_value(&sched)?,
            "report": to_value(&rep)?,
        }),
        verdicts,
        tables: vec![table],
    })
}

pub fn audit(cfg: &RunConfig) -> Result<Section> {
    let Setup { imm, base } = setup(cfg)?;
    let ac = &cfg.audit;
    let audit = curvature_audit(
        &imm,
        &base,
        &CurvatureSampling::new(ac.per_axis, ac.shells.clone()),
    )?;
    let xi = xi_estimate(&imm, &base, &ac.shells, ac.xi_lines)?;
    let verdicts = vec![Verdict::new(
        "curvature_bound",
        "sup r~ max|kappa| <= 1 with a point of strict inequality",
        audit.curvature_bound.passed(),
        format!(
            "{} chart samples per axis with compass refinement",
            ac.per_axis
        ),
    )];
    let mut decay = Table::new("audit_decay", &["r", "tail_sup", "shell_sup"]);
    for t in &audit.decay_trend {
        decay.push(vec![t.r.into(), t.tail_sup.into(), t.shell_sup.into()]);
    }
    let mut bands = Table::new("audit_xi", &["r", "inf", "sup", "samples"]);
    for b in &xi.bands {
        bands.push(vec![
            b.r.into(),
            b.inf.into(),
            b.sup.into(),
            b.samples.into(),
        ]);
    }
    Ok(Section {
        payload: json!({ "audit": to_value(&audit)?, "xi": to_value(&xi)? }),
        verdicts,
        tables: vec![decay, bands],
    })
}

pub fn pohozaev(cfg: &RunConfig) -> Result<Section> {
    let Setup { imm, base } = setup(cfg)?;
    let pc = &cfg.pohozaev;
    let u = pc
        .function
        .clone()
        .unwrap_or_else(|| AmbientFunction::Gaussian {
            center: base.ambient_point.clone(),
            width: 1.5,
            amplitude: 1.0,
        });
    let region = Region::Ball {
        base: base.clone(),
        radius: pc.radius,
    };
    let reports = pc
        .levels
        .iter()
        .map(|&level| {
            identity_residual(
                &imm,
                &region,
                &u,
                &base,
                pc.lambda,
                &QuadratureOptions::uniform(level),
            )
        })
        .collect::<minlap::Result<Vec<_>>>()?;
    let audit = absence_audit(
        &imm,
        &base,
        &u,
        &AbsenceConfig {
            lambda: pc.lambda,
            radii: pc.audit_radii.clone(),
            per_axis: pc.per_axis,
            level: pc.audit_level,
        },
    )?;
    let identity_ok = reports
        .last()
        .is_some_and(|r| r.residual <= IDENTITY_TOL * r.lhs.abs().max(1.0));
    let finest = pc.levels.last().copied().unwrap_or(0);
    let verdicts = vec![
        Verdict::new(
            "pohozaev_identity",
            "domain and boundary sides of the identity agree at the finest level",
            identity_ok,
            format!("uniform quadrature level {finest}"),
        ),
        Verdict::new(
            "absence_hypotheses",
            "Hess h >= 0 everywhere with a point where it is positive definite",
            audit.verdict == AbsenceVerdict::Consistent,
            format!("{} chart samples per axis", pc.per_axis),
        ),
    ];
    let mut identity = Table::new(
        "pohozaev_identity",
        &["level", "cells", "lhs", "rhs", "residual"],
    );
    for (level, r) in pc.levels.iter().zip(&reports) {
        identity.push(vec![
            (*level).into(),
            r.cells.into(),
            r.lhs.into(),
            r.rhs.into(),
            r.residual.into(),
        ]);
    }
    let mut balls = Table::new(
        "pohozaev_balls",
        &[
            "r",
            "hess_integral",
            "dirichlet",
            "l2",
            "phi",
            "boundary_terms",
        ],
    );
    for r in &audit.rows {
        balls.push(vec![
            r.r.into(),
            r.hess_integral.into(),
            r.dirichlet.into(),
            r.l2.into(),
            r.phi.into(),
            r.boundary_terms.into(),
        ]);
    }
    Ok(Section {
        payload: json!({ "function": to_value(&u)?, "identity": to_value(&reports)?, "absence": to_value(&audit)? }),
        verdicts,
        tables: vec![identity, balls],
    })
}

pub fn bdgg(cfg: &RunConfig) -> Result<Section> {
    let bc = &cfg.bdgg;
    let mut p = params(bc.m).with_constants(bc.b, bc.d)?;
    if let Some(l) = bc.lambda {
        p = p.with_lambda(l)?;
    }
    let sol = solve_reduced_mse(&p, bc.radius, &SolverOptions::new(bc.resolution))?;
    let bands = normal_alignment_probe(&sol, &bc.shells)?;
    let resolution = format!(
        "{} rings on the quarter disk of radius {}",
        bc.resolution, bc.radius
    );
    let verdicts = vec![
        Verdict::new(
            "bdgg_antisymmetry",
            "f(u, v) = -f(v, u) to 1e-8",
            sol.antisymmetry <= SYMMETRY_TOL,
            &resolution,
        ),
        Verdict::new(
            "bdgg_diagonal",
            "f vanishes on the diagonal u = v to 1e-8",
            sol.diagonal_max <= SYMMETRY_TOL,
            &resolution,
        ),
    ];
    let mut values = Table::new("bdgg", &["u", "v", "f"]);
    for [u, v, f] in sol.rows() {
        values.push(vec![u.into(), v.into(), f.into()]);
    }
    let mut probe = Table::new(
        "bdgg_probe",
        &["r_inner", "r_outer", "inf", "sup", "samples"],
    );
    for b in &bands {
        probe.push(vec![
            b.r_inner.into(),
            b.r_outer.into(),
            b.inf.into(),
            b.sup.into(),
            b.samples.into(),
        ]);
    }
    Ok(Section {
        payload: json!({
            "params": to_value(&p)?,
            "solution": to_value(&sol)?,
            "probe": to_value(&bands)?,
        }),
        verdicts,
        tables: vec![values, probe],
    })
}
