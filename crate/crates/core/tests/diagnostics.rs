use std::f64::consts::PI;

use minlap::diagnostics::{
    cheng_bound, curvature_audit, graph_hessian_audit, small_radius_limit, volume_growth,
    xi_estimate, CurvatureBoundVerdict, CurvatureSampling, FailReason,
};
use minlap::geometry::{unit_ball_volume, BasePoint, ChartDomain};
use minlap::surfaces::{make_immersion, GraphFamily, SurfaceSpec};
use minlap::Error;

fn catenoid() -> minlap::geometry::Immersion {
    make_immersion(&SurfaceSpec::catenoid(1.0)).unwrap()
}

#[test]
fn plane_volume_growth_is_flat() {
    let imm = make_immersion(&SurfaceSpec::plane(2)).unwrap();
    let base = BasePoint::on_surface(&imm, &[0.0, 0.0]);
    let radii: Vec<f64> = (1..=10).map(f64::from).collect();
    let rep = volume_growth(&imm, &base, &radii, 4).unwrap();
    assert!(
        rep.ratios.iter().all(|r| (r - PI).abs() < 1e-4),
        "{:?}",
        rep.ratios
    );
    assert!(rep.monotone_verdict);
    assert_eq!(rep.ends_bound, 1);
    assert!(rep.miranda_verdict);
    assert!((rep.miranda_rhs[0] - 6.0 * PI).abs() < 1e-12);
    assert!(!rep.gap_flag);
    assert!(rep.mu_estimate < 0.5 && rep.brooks_bound >= 0.0);
    let far = volume_growth(&imm, &base, &[100.0, 200.0, 400.0, 800.0], 3).unwrap();
    assert!(far.mu_estimate < 0.01);
}

#[test]
fn catenoid_volume_growth_has_two_ends() {
    let rep = volume_growth(
        &catenoid(),
        &BasePoint::origin(3),
        &[5.0, 10.0, 20.0, 40.0],
        4,
    )
    .unwrap();
    assert!(rep.monotone_verdict, "{:?}", rep.ratios);
    assert!(rep.ratios[3] / PI >= 1.85);
    assert!(rep.ratios[3] < 2.0 * PI);
    assert_eq!(rep.ends_bound, 2);
    assert!(rep.gap_flag);
    assert!(rep.miranda_verdict);
    assert!(rep.f_n_estimate <= rep.c_n_estimate);
}

#[test]
fn volume_growth_rejects_short_or_unsorted_radii() {
    let imm = catenoid();
    let o = BasePoint::origin(3);
    assert!(volume_growth(&imm, &o, &[1.0, 2.0], 3).is_err());
    assert!(volume_growth(&imm, &o, &[1.0, 3.0, 2.0], 3).is_err());
}

#[test]
fn small_radius_limits_tend_to_one() {
    let plane = make_immersion(&SurfaceSpec::plane(2)).unwrap();
    let v = small_radius_limit(
        &plane,
        &BasePoint::on_surface(&plane, &[0.3, 0.1]),
        &[0.5, 0.1],
        5,
    )
    .unwrap();
    assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-5), "{v:?}");

    let cat = catenoid();
    let neck = BasePoint::on_surface(&cat, &[0.0, 0.0]);
    let v = small_radius_limit(&cat, &neck, &[0.2, 0.1, 0.05], 5).unwrap();
    assert!(v.iter().all(|x| (1.0..=1.02).contains(x)), "{v:?}");
    assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-6), "{v:?}");

    let bowl = make_immersion(&SurfaceSpec::graph(GraphFamily::Quadratic {
        n: 2,
        coeff: 0.5,
    }))
    .unwrap();
    let v = small_radius_limit(
        &bowl,
        &BasePoint::on_surface(&bowl, &[0.0, 0.0]),
        &[0.2, 0.05],
        5,
    )
    .unwrap();
    assert!(v.iter().all(|x| (x - 1.0).abs() < 0.01), "{v:?}");
    assert!(v[1] <= v[0]);
}

#[test]
fn plane_audit_is_strict_everywhere() {
    let imm = make_immersion(&SurfaceSpec::plane(2).with_radius(50.0)).unwrap();
    let audit = curvature_audit(
        &imm,
        &BasePoint::on_surface(&imm, &[0.0, 0.0]),
        &CurvatureSampling::new(41, vec![1.0, 10.0]),
    )
    .unwrap();
    assert_eq!(audit.sup_scaled_kappa, 0.0);
    assert!(matches!(
        audit.curvature_bound,
        CurvatureBoundVerdict::PassStrict { .. }
    ));
    assert!((audit.min_hess_h - 1.0).abs() < 1e-12);
}

#[test]
fn catenoid_audit_attains_bound_only_on_neck() {
    let audit = curvature_audit(
        &catenoid(),
        &BasePoint::origin(3),
        &CurvatureSampling::new(201, vec![2.0, 10.0, 100.0, 1000.0, 5000.0]),
    )
    .unwrap();
    assert!((audit.sup_scaled_kappa - 1.0).abs() <= 1e-6);
    match &audit.curvature_bound {
        CurvatureBoundVerdict::PassEqualityOnlyAt {
            equality, witness, ..
        } => {
            assert!(
                equality.chart_lo[0].abs() < 0.05 && equality.chart_hi[0].abs() < 0.05,
                "{equality:?}"
            );
            assert!(witness.value < 1.0 - 1e-6);
        }
        other => panic!("unexpected verdict {other:?}"),
    }
    // Hess h ≥ 0 exactly when r̃·max|κ| ≤ 1.
    assert!(audit.min_hess_h >= -1e-9);
    // Both decay estimators go to zero together.
    let last = audit.decay_trend.last().unwrap();
    assert!(last.tail_sup < 1e-2 && last.shell_sup < 1e-2, "{last:?}");
    assert!(audit
        .decay_trend
        .windows(2)
        .all(|w| w[1].tail_sup <= w[0].tail_sup));
    // ∫‖A‖² = −2∫K = 8π on the full catenoid; truncation at |t| ≤ 10 is negligible.
    assert!(
        (audit.total_curvature_n / (8.0 * PI) - 1.0).abs() < 0.02,
        "{}",
        audit.total_curvature_n
    );
    assert!(audit
        .miranda_a2
        .iter()
        .all(|row| row.ratio <= 8.0 * PI * 1.02));
    assert!(audit.xi_bands.iter().all(|b| b.inf >= 0.0 && b.sup <= 1.0));
}

#[test]
fn neck_base_fails_with_antipodal_witness() {
    let imm = catenoid();
    let audit = curvature_audit(
        &imm,
        &BasePoint::on_surface(&imm, &[0.0, 0.0]),
        &CurvatureSampling::new(101, vec![1.0, 10.0]),
    )
    .unwrap();
    match &audit.curvature_bound {
        CurvatureBoundVerdict::Fail {
            reason: FailReason::ExceedsBound,
            witness,
        } => {
            assert!((witness.r_tilde - 2.0).abs() < 0.05, "{witness:?}");
            assert!((witness.value - 2.0).abs() < 0.05);
        }
        other => panic!("unexpected verdict {other:?}"),
    }
    assert!(audit.min_hess_h < 0.0);
}

#[test]
fn linear_graph_has_no_normal_alignment() {
    let imm = make_immersion(&SurfaceSpec::graph(GraphFamily::Linear {
        coeffs: vec![0.5, -1.0],
        offset: 2.0,
    }))
    .unwrap();
    let base = BasePoint::on_surface(&imm, &[1.0, 1.0]);
    let rep = xi_estimate(&imm, &base, &[1.0, 10.0, 100.0], 16).unwrap();
    assert!(
        rep.bands.iter().all(|b| b.samples > 0 && b.sup < 1e-12),
        "{rep:?}"
    );
    assert!(rep.converged);
}

#[test]
fn catenoid_xi_band_shrinks() {
    let rep = xi_estimate(
        &catenoid(),
        &BasePoint::origin(3),
        &[3.0, 10.0, 100.0, 1000.0],
        16,
    )
    .unwrap();
    // Closed form on the sphere through t: |t sinh t − cosh t| / (r̃ cosh t).
    for b in &rep.bands {
        let (mut lo, mut hi) = (0.0_f64, 20.0_f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m.cosh().powi(2) + m * m < b.r * b.r {
                lo = m;
            } else {
                hi = m;
            }
        }
        let want = (lo * lo.sinh() - lo.cosh()).abs() / (b.r * lo.cosh());
        assert!(
            (b.sup - want).abs() < 1e-9 && (b.inf - want).abs() < 1e-9,
            "{b:?} vs {want}"
        );
    }
    // The band peaks near r̃ ≈ 10 and decays afterwards.
    assert!(
        rep.bands[1..].windows(2).all(|w| w[1].sup < w[0].sup),
        "{rep:?}"
    );
    assert!(rep.converged);
    assert!(rep.bands.last().unwrap().sup < 1e-2);
}

#[test]
fn non_convergent_controls() {
    // Cubic graph on a small chart: the band stays wide over the reachable shells.
    let cubic = make_immersion(
        &SurfaceSpec::graph(GraphFamily::Cubic { n: 2, coeff: 1.0 }).with_radius(10.0),
    )
    .unwrap();
    let rep = xi_estimate(&cubic, &BasePoint::origin(3), &[2.0, 4.0, 8.0], 32).unwrap();
    assert!(!rep.converged, "{rep:?}");
    // The helicoid keeps |dr̃(ν)| near 1/√2 where the sheet meets the axis height.
    let helicoid = make_immersion(&SurfaceSpec::helicoid(1.0)).unwrap();
    let rep = xi_estimate(&helicoid, &BasePoint::origin(3), &[2.0, 5.0, 10.0], 32).unwrap();
    assert!(!rep.converged);
    assert!(rep.bands.iter().all(|b| b.sup > 0.5), "{rep:?}");
}

#[test]
fn decay_chain_on_catenoid() {
    let imm = catenoid();
    let o = BasePoint::origin(3);
    let audit =
        curvature_audit(&imm, &o, &CurvatureSampling::new(101, vec![100.0, 1000.0])).unwrap();
    assert!(audit.decay_trend.last().unwrap().tail_sup < 1e-2);
    let xi = xi_estimate(&imm, &o, &[100.0, 1000.0], 8).unwrap();
    assert!(xi.bands.last().unwrap().sup < 5e-2);
    let vol = volume_growth(&imm, &o, &[10.0, 20.0, 40.0], 3).unwrap();
    assert!(vol.c_n_estimate <= vol.ends_bound as f64 * PI * 1.05);
}

#[test]
fn graph_hessian_audit_examples() {
    let linear = GraphFamily::Linear {
        coeffs: vec![1.0, 2.0],
        offset: 3.0,
    }
    .to_function();
    let rep = graph_hessian_audit(&linear, &ChartDomain::cube(2, 5.0), 21);
    assert!(rep.passed && rep.strict && rep.sup_ratio == 0.0);

    let cubic = GraphFamily::Cubic { n: 2, coeff: 1.0 }.to_function();
    let rep = graph_hessian_audit(&cubic, &ChartDomain::cube(2, 5.0), 21);
    assert!(!rep.passed);
}

#[test]
fn cheng_bound_examples() {
    assert_eq!(cheng_bound(0.0, 7).unwrap(), 0.0);
    assert_eq!(cheng_bound(4.0, 2).unwrap(), 1.0);
    assert_eq!(cheng_bound(1.0, 3).unwrap(), 1.0);
    assert!(matches!(cheng_bound(-1.0, 2), Err(Error::NegativeC(_))));
}

#[test]
fn unit_ball_volume_ratio_lower_bound() {
    for n in 1..=10 {
        let lhs = unit_ball_volume(n + 1) / unit_ball_volume(n);
        assert!(lhs >= (2.0 * PI).sqrt() / ((n + 2) as f64).sqrt(), "n={n}");
    }
}
