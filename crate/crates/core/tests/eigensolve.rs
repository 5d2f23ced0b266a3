use minlap::eigensolve::{lambda1_curve, pencil_eigenpairs, smallest_eigenpairs, EigenOptions};
use minlap::geometry::BasePoint;
use minlap::meshing::{assemble, ball_mesh, triangulate};
use minlap::sparse::CsrMatrix;
use minlap::surfaces::{make_immersion, SurfaceSpec};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{rngs::StdRng, Rng, SeedableRng};

/// First Dirichlet eigenvalue of the unit disk, `j₀,₁²`.
const DISK_LAMBDA1: f64 = 5.783_185_962_946_784;

fn random_spd(n: usize, rng: &mut StdRng, shift: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    &a * a.transpose() + DMatrix::identity(n, n) * shift
}

#[test]
fn dense_oracle_on_random_pencil() {
    let mut rng = StdRng::seed_from_u64(7);
    let n = 50;
    let k = random_spd(n, &mut rng, 0.5);
    let m = random_spd(n, &mut rng, n as f64);
    // Reduce to a standard problem through the Cholesky factor of M.
    let l = m.clone().cholesky().unwrap().l();
    let linv = l.clone().try_inverse().unwrap();
    let c = &linv * &k * linv.transpose();
    let mut oracle: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    oracle.sort_by(f64::total_cmp);

    let res = pencil_eigenpairs(
        &CsrMatrix::from_dense(&k),
        &CsrMatrix::from_dense(&m),
        5,
        &EigenOptions::default(),
    )
    .unwrap();
    for (got, want) in res.eigenvalues.iter().zip(&oracle) {
        assert!(
            (got - want).abs() <= 1e-9 * want.abs().max(1.0),
            "{got} vs {want}"
        );
    }
    // M-orthonormality.
    let mm = CsrMatrix::from_dense(&m);
    for (i, x) in res.eigenvectors.iter().enumerate() {
        let mx = mm.mul_vec(x);
        for (j, y) in res.eigenvectors.iter().enumerate() {
            let ip: f64 = y.iter().zip(&mx).map(|(a, b)| a * b).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((ip - want).abs() < 1e-8);
        }
    }
    assert!(res.residuals.iter().all(|r| *r <= 1e-8));
}

#[test]
fn shifted_solve_matches_unshifted() {
    let mut rng = StdRng::seed_from_u64(11);
    let n = 30;
    let k = CsrMatrix::from_dense(&random_spd(n, &mut rng, 1.0));
    let m = CsrMatrix::identity(n);
    let plain = pencil_eigenpairs(&k, &m, 3, &EigenOptions::default()).unwrap();
    let shifted = pencil_eigenpairs(
        &k,
        &m,
        3,
        &EigenOptions {
            shift: -2.0,
            ..EigenOptions::default()
        },
    )
    .unwrap();
    for (a, b) in plain.eigenvalues.iter().zip(&shifted.eigenvalues) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn too_many_pairs_is_an_error() {
    let k = CsrMatrix::identity(3);
    assert!(pencil_eigenpairs(&k, &k, 4, &EigenOptions::default()).is_err());
    assert!(pencil_eigenpairs(&k, &k, 0, &EigenOptions::default()).is_err());
}

#[test]
fn unit_disk_first_eigenvalue() {
    let imm = make_immersion(&SurfaceSpec::plane(2).with_radius(1.0)).unwrap();
    let mesh = triangulate(&imm, 70).unwrap();
    assert!(mesh.vertex_count() >= 9_000);
    let res = smallest_eigenpairs(&assemble(&mesh).unwrap(), 1, 1e-8).unwrap();
    let rel = (res.eigenvalues[0] - DISK_LAMBDA1).abs() / DISK_LAMBDA1;
    assert!(rel < 0.01, "{}", res.eigenvalues[0]);
}

#[test]
fn refinement_lowers_eigenvalue_towards_limit() {
    let imm = make_immersion(&SurfaceSpec::plane(2).with_radius(1.0)).unwrap();
    let vals: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&res| {
            let pair = assemble(&triangulate(&imm, res).unwrap()).unwrap();
            smallest_eigenpairs(&pair, 1, 1e-10).unwrap().eigenvalues[0]
        })
        .collect();
    // Linear elements on an inscribed polygon overshoot, and the overshoot
    // shrinks at second order.
    assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
    assert!(vals[2] > DISK_LAMBDA1);
    let (e1, e2) = (vals[1] - DISK_LAMBDA1, vals[2] - DISK_LAMBDA1);
    assert!((e1 / e2).log2() > 1.7, "{vals:?}");
}

#[test]
fn eigenvalues_scale_inverse_quadratically() {
    let spec = SurfaceSpec::catenoid(1.0).with_t_max(1.5);
    let imm = make_immersion(&spec).unwrap();
    let base_val = smallest_eigenpairs(
        &assemble(&triangulate(&imm, 12).unwrap()).unwrap(),
        3,
        1e-11,
    )
    .unwrap();
    for c in [0.5, 2.0, 10.0] {
        let scaled = imm.scaled(c);
        let pair = assemble(&triangulate(&scaled, 12).unwrap()).unwrap();
        let res = smallest_eigenpairs(&pair, 3, 1e-11).unwrap();
        for (a, b) in base_val.eigenvalues.iter().zip(&res.eigenvalues) {
            assert!(
                (a / (c * c) - b).abs() <= 1e-10 * a / (c * c),
                "c={c}: {a} {b}"
            );
        }
    }
}

#[test]
fn plane_ball_curve_is_scale_free() {
    let imm = make_immersion(&SurfaceSpec::plane(2)).unwrap();
    let base = BasePoint::on_surface(&imm, &[0.0, 0.0]);
    let curve = lambda1_curve(&imm, &base, &[1.0, 10.0, 100.0], 20).unwrap();
    for p in &curve {
        assert!((p.lambda1_r2 / DISK_LAMBDA1 - 1.0).abs() < 0.02, "{p:?}");
        assert!(p.residual <= 1e-8);
    }
}

#[test]
fn catenoid_curve_decreases_below_plane_value() {
    let imm = make_immersion(&SurfaceSpec::catenoid(1.0)).unwrap();
    let curve = lambda1_curve(&imm, &BasePoint::origin(3), &[5.0, 10.0, 20.0, 40.0], 20).unwrap();
    for w in curve.windows(2) {
        assert!(w[1].lambda1_r2 < w[0].lambda1_r2, "{curve:?}");
    }
    assert!(curve.iter().all(|p| p.lambda1_r2 <= 1.05 * DISK_LAMBDA1));
    assert!(curve.last().unwrap().lambda1 < 1e-2);
}

#[test]
fn curve_requires_ascending_radii() {
    let imm = make_immersion(&SurfaceSpec::plane(2)).unwrap();
    let base = BasePoint::origin(3);
    assert!(lambda1_curve(&imm, &base, &[2.0, 1.0], 8).is_err());
}

#[test]
fn ball_mesh_eigenvalue_independent_of_base_convention_on_plane() {
    let imm = make_immersion(&SurfaceSpec::plane(2)).unwrap();
    let on = BasePoint::on_surface(&imm, &[0.0, 0.0]);
    let amb = BasePoint::ambient(vec![0.0, 0.0, 0.0]);
    let a = smallest_eigenpairs(
        &assemble(&ball_mesh(&imm, &on, 2.0, 16).unwrap()).unwrap(),
        1,
        1e-10,
    )
    .unwrap();
    let b = smallest_eigenpairs(
        &assemble(&ball_mesh(&imm, &amb, 2.0, 16).unwrap()).unwrap(),
        1,
        1e-10,
    )
    .unwrap();
    assert!((a.eigenvalues[0] - b.eigenvalues[0]).abs() < 1e-10);
}
