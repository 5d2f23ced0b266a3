use std::f64::consts::PI;

use minlap::diagnostics::xi_estimate;
use minlap::geometry::BasePoint;
use minlap::surfaces::{make_immersion, SurfaceSpec};
use minlap::weyl::{build_schedule, residual, weyl_report, Cutoff, WeylConfig};
use minlap::Error;
use proptest::prelude::*;

/// Composite Simpson rule on `[a, b]`.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Mass and residual ratio of the plane row from the radial reduction
/// `dV = 2πr dr`, `‖∇r̃‖ = 1`, `Δr̃ = 1/r`.
fn plane_oracle(psi: &Cutoff, eps: f64, lambda: f64) -> (f64, f64) {
    let sl = lambda.sqrt();
    let pieces = [(psi.c, psi.a), (psi.a, psi.b), (psi.b, psi.d)];
    let integrate = |f: &dyn Fn(f64) -> f64| -> f64 {
        pieces
            .iter()
            .map(|&(lo, hi)| simpson(|s| f(s / eps) * 2.0 * PI * s / eps / eps, lo, hi, 4000))
            .sum()
    };
    let vol = PI * (psi.d * psi.d - psi.c * psi.c) / (eps * eps);
    let mass = integrate(&|r| psi.eval(eps * r).0.powi(2)) / vol;
    let res = integrate(&|r| {
        let (p, p1, p2) = psi.eval(eps * r);
        let re = eps * eps * p2 + eps * p1 / r;
        let im = 2.0 * eps * sl * p1 + sl * p / r;
        re * re + im * im
    }) / vol;
    (mass, (res / mass).sqrt())
}

#[test]
fn schedule_constants() {
    let plane = build_schedule(&WeylConfig::new(2, PI, PI)).unwrap();
    assert!((plane.theta - 1.0).abs() < 1e-15);
    assert!((plane.tau - 0.1875).abs() < 1e-15);
    let cat = build_schedule(&WeylConfig::new(2, 2.0 * PI, PI)).unwrap();
    assert!((cat.theta - 2f64.sqrt()).abs() < 1e-15);
    assert!((cat.tau - 3.0 / 32.0).abs() < 1e-15);
    for row in &cat.rows {
        assert!(0.0 < row.c && row.c < row.a && row.a < row.b && row.b < row.d);
        assert!(row.eps * row.c_m <= 1.0 / row.m as f64);
        // Volume-ratio bound with the configured constants.
        let n = 2;
        let lhs = 0.5 * (row.b / row.d).powi(n) - (row.a / row.d).powi(n);
        assert!(lhs >= cat.tau - 1e-15);
    }
    let rows = &cat.rows;
    assert!(rows
        .windows(2)
        .all(|w| w[1].d > w[0].d && w[1].eps * w[1].c_m <= w[0].eps * w[0].c_m));
}

#[test]
fn schedule_rejects_bad_inputs() {
    let mut cfg = WeylConfig::new(2, PI, PI);
    cfg.alpha_shape = 1.0;
    assert!(matches!(
        build_schedule(&cfg),
        Err(Error::InvalidSchedule(_))
    ));
    assert!(matches!(
        build_schedule(&WeylConfig::new(2, 1.0, 2.0)),
        Err(Error::InvalidRatio { .. })
    ));
    let mut cfg = WeylConfig::new(2, PI, PI);
    cfg.lambda = 0.0;
    assert!(build_schedule(&cfg).is_err());
}

#[test]
fn cutoff_plateau_and_support() {
    let psi = Cutoff {
        c: 1.0,
        a: 2.0,
        b: 4.0,
        d: 8.0,
    };
    assert_eq!(psi.eval(3.0), (1.0, 0.0, 0.0));
    assert_eq!(psi.eval(0.5), (0.0, 0.0, 0.0));
    assert_eq!(psi.eval(8.0), (0.0, 0.0, 0.0));
    assert_eq!(psi.eval(9.0), (0.0, 0.0, 0.0));
    // Sampled derivative maxima against the closed forms for each transition.
    let (mut d1, mut d2) = (0.0_f64, 0.0_f64);
    for i in 0..=200_000 {
        let t = 1.0 + i as f64 * 1e-5;
        let (_, p1, p2) = psi.eval(t);
        d1 = d1.max(p1.abs());
        d2 = d2.max(p2.abs());
    }
    assert!((d1 - 15.0 / 8.0).abs() < 1e-6);
    assert!((d2 - 10.0 / 3f64.sqrt()).abs() < 1e-6);
    let (m1, m2) = psi.derivative_maxima();
    assert!((m1 - d1).abs() < 1e-6 && (m2 - d2).abs() < 1e-6);
    let sched = build_schedule(&WeylConfig::new(2, PI, PI)).unwrap();
    for row in &sched.rows {
        let (m1, m2) = row.cutoff().derivative_maxima();
        assert!(m1 <= row.c_m && m2 <= row.c_m);
    }
}

proptest! {
    #[test]
    fn cutoff_derivatives_match_differences(t in 0.5f64..8.5) {
        let psi = Cutoff { c: 1.0, a: 2.0, b: 4.0, d: 8.0 };
        let h = 1e-6;
        let (p, p1, p2) = psi.eval(t);
        prop_assert!((0.0..=1.0).contains(&p));
        let fd1 = (psi.eval(t + h).0 - psi.eval(t - h).0) / (2.0 * h);
        let fd2 = (psi.eval(t + h).1 - psi.eval(t - h).1) / (2.0 * h);
        prop_assert!((fd1 - p1).abs() < 1e-6);
        prop_assert!((fd2 - p2).abs() < 1e-5);
    }
}

#[test]
fn plane_weyl_sequence() {
    let imm = make_immersion(&SurfaceSpec::plane(2)).unwrap();
    let base = BasePoint::on_surface(&imm, &[0.0, 0.0]);
    let sched = build_schedule(&WeylConfig::new(2, PI, PI)).unwrap();
    let rep = weyl_report(&imm, &base, &sched, 0.0, 4).unwrap();
    assert!(rep.mass_verdict && rep.bound_verdict && rep.monotone_verdict);
    for (row, srow) in rep.rows.iter().zip(&sched.rows) {
        assert!(row.mass >= 0.1875 - 1e-2);
        assert!(row.cutoff_term <= row.cutoff_bound && row.laplacian_term <= row.laplacian_bound);
        assert!(row.alignment_term == 0.0 && row.alignment_bound == 0.0);
        let (mass, ratio) = plane_oracle(&srow.cutoff(), srow.eps, 1.0);
        assert!(
            (row.mass / mass - 1.0).abs() < 1e-5,
            "{} vs {mass}",
            row.mass
        );
        assert!(
            (row.residual_ratio / ratio - 1.0).abs() < 1e-4,
            "{} vs {ratio}",
            row.residual_ratio
        );
    }
    assert!(rep
        .rows
        .windows(2)
        .all(|w| w[1].residual_ratio < w[0].residual_ratio));
    assert!(rep.rows[0].residual_ratio / rep.rows[5].residual_ratio >= 4.0);
    assert_eq!(rep.certified_value, 1.0);
}

#[test]
fn catenoid_alignment_term_is_dominated() {
    let imm = make_immersion(&SurfaceSpec::catenoid(1.0)).unwrap();
    let base = BasePoint::origin(3);
    let mut cfg = WeylConfig::new(2, 2.0 * PI, PI);
    cfg.m_max = 3;
    let sched = build_schedule(&cfg).unwrap();
    let rep = weyl_report(&imm, &base, &sched, 0.0, 4).unwrap();
    assert!(
        rep.mass_verdict && rep.bound_verdict && rep.monotone_verdict,
        "{rep:?}"
    );
    for row in &rep.rows {
        assert!(row.mass >= 3.0 / 32.0 - 1e-2);
        // Sup of |dr̃(ν)| over the support from shell sampling.
        let shells: Vec<f64> = (0..=40)
            .map(|i| row.inner * (row.outer / row.inner).powf(i as f64 / 40.0))
            .collect();
        let xi = xi_estimate(&imm, &base, &shells, 4).unwrap();
        let sup = xi.bands.iter().map(|b| b.sup).fold(0.0, f64::max);
        assert!(
            row.alignment_term <= sup.powi(4),
            "{} vs {}",
            row.alignment_term,
            sup.powi(4)
        );
        assert!(
            (row.alignment_bound - sup.powi(4)).abs() <= 0.05 * row.alignment_bound,
            "{} vs {}",
            row.alignment_bound,
            sup.powi(4)
        );
    }
}

#[test]
fn nonzero_xi_shifts_certified_value() {
    let imm = make_immersion(&SurfaceSpec::plane(2)).unwrap();
    let base = BasePoint::on_surface(&imm, &[0.0, 0.0]);
    let mut cfg = WeylConfig::new(2, PI, PI);
    cfg.m_max = 1;
    let sched = build_schedule(&cfg).unwrap();
    let rep = weyl_report(&imm, &base, &sched, 0.5, 3).unwrap();
    assert_eq!(rep.certified_value, 0.75);
    // On the plane ‖∇r̃‖ = 1, so the alignment term is λ²ξ⁴ times the mass.
    let row = &rep.rows[0];
    assert!((row.alignment_term - 0.0625 * row.mass).abs() < 1e-9);
    assert!((row.alignment_bound - 0.0625).abs() < 1e-12);
    assert!(residual(&imm, &base, &sched, 2, 0.0, 3).is_err());
    assert!(residual(&imm, &base, &sched, 1, 1.5, 3).is_err());
}

#[test]
fn short_catenoid_is_too_small() {
    let imm = make_immersion(&SurfaceSpec::catenoid(1.0).with_t_max(4.0)).unwrap();
    let sched = build_schedule(&WeylConfig::new(2, 2.0 * PI, PI)).unwrap();
    assert!(matches!(
        residual(&imm, &BasePoint::origin(3), &sched, 1, 0.0, 3),
        Err(Error::TruncationTooSmall { .. })
    ));
}
