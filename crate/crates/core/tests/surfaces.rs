use std::f64::consts::PI;

use approx::assert_relative_eq;
use minlap::geometry::point_frame;
use minlap::surfaces::{
    catenoid_inequalities, make_immersion, minimality_residual, GraphFamily, GraphFunctionSpec,
    SurfaceSpec,
};
use minlap::Error;
use rand::{Rng, SeedableRng};

fn random_samples(n: usize, count: usize, lo: &[f64], hi: &[f64]) -> Vec<Vec<f64>> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    (0..count)
        .map(|_| (0..n).map(|i| rng.gen_range(lo[i]..hi[i])).collect())
        .collect()
}

#[test]
fn catalog_points() {
    let cat = make_immersion(&SurfaceSpec::catenoid(1.0)).unwrap();
    assert_eq!(cat.point(&[0.0, 0.0]).as_slice(), &[1.0, 0.0, 0.0]);
    let plane = make_immersion(&SurfaceSpec::plane(2)).unwrap();
    assert_eq!(
        point_frame(&plane, &[3.0, -4.0]).unwrap().g,
        nalgebra::DMatrix::identity(2, 2)
    );
}

#[test]
fn linear_graph_density_is_sqrt_two() {
    let imm = make_immersion(&SurfaceSpec::graph(GraphFamily::Linear {
        coeffs: vec![1.0, 0.0],
        offset: 0.0,
    }))
    .unwrap();
    for q in [[0.0, 0.0], [5.0, -3.0]] {
        assert_relative_eq!(
            point_frame(&imm, &q).unwrap().volume_density(),
            2f64.sqrt(),
            epsilon = 1e-14
        );
    }
}

#[test]
fn graph_density_matches_gradient_formula() {
    let spec = SurfaceSpec::graph(GraphFamily::Cubic { n: 2, coeff: 0.3 });
    let imm = make_immersion(&spec).unwrap();
    let g = spec.graph_function().unwrap();
    for q in random_samples(2, 50, &[-3.0, -3.0], &[3.0, 3.0]) {
        let df = (g.df)(&q);
        let expect = (1.0 + df.iter().map(|x| x * x).sum::<f64>()).sqrt();
        assert_relative_eq!(
            point_frame(&imm, &q).unwrap().volume_density(),
            expect,
            max_relative = 1e-10
        );
    }
}

#[test]
fn minimal_catalog_passes_residual() {
    let cases = [
        (SurfaceSpec::plane(2), [-50.0, -50.0], [50.0, 50.0]),
        (SurfaceSpec::catenoid(1.0), [-8.0, -PI], [8.0, PI]),
        (SurfaceSpec::catenoid(2.5), [-8.0, -PI], [8.0, PI]),
        (SurfaceSpec::helicoid(0.5), [-20.0, -12.0], [20.0, 12.0]),
        (
            SurfaceSpec::graph(GraphFamily::Linear {
                coeffs: vec![2.0, -1.0],
                offset: 1.0,
            }),
            [-50.0, -50.0],
            [50.0, 50.0],
        ),
        (
            SurfaceSpec::graph(GraphFamily::Scherk),
            [-1.5, -1.5],
            [1.5, 1.5],
        ),
    ];
    for (spec, lo, hi) in cases {
        let samples = random_samples(2, 1000, &lo, &hi);
        let res = minimality_residual(&spec, &samples).unwrap();
        assert!(res <= 1e-8, "{}: {res}", spec.label());
        // Point-frame mean curvature agrees.
        let imm = make_immersion(&spec).unwrap();
        for q in samples.iter().take(100) {
            assert!(point_frame(&imm, q).unwrap().mean_curvature.abs() <= 1e-8);
        }
    }
}

#[test]
fn catenoid_residual_is_tiny() {
    let samples = random_samples(2, 100, &[-5.0, -3.0], &[5.0, 3.0]);
    assert!(minimality_residual(&SurfaceSpec::catenoid(1.0), &samples).unwrap() <= 1e-10);
}

#[test]
fn parabola_is_a_negative_control() {
    let spec = SurfaceSpec::graph(GraphFamily::Quadratic { n: 2, coeff: 1.0 });
    assert!(!spec.is_minimal());
    let res = minimality_residual(&spec, &[vec![0.0, 0.0]]).unwrap();
    assert_relative_eq!(res, 1.0, epsilon = 1e-15);
    // Frame path agrees with the divergence form.
    let h = point_frame(&make_immersion(&spec).unwrap(), &[0.7, -0.2])
        .unwrap()
        .mean_curvature;
    let res = minimality_residual(&spec, &[vec![0.7, -0.2]]).unwrap();
    assert_relative_eq!(h.abs(), res, max_relative = 1e-12);
}

#[test]
fn custom_graph_evaluates() {
    let f = GraphFunctionSpec::new(
        2,
        "saddle",
        false,
        |q| q[0] * q[1],
        |q| vec![q[1], q[0]],
        |_| vec![0.0, 1.0, 1.0, 0.0],
    );
    let spec = SurfaceSpec::custom_graph(f);
    let imm = make_immersion(&spec).unwrap();
    assert_eq!(imm.point(&[2.0, 3.0])[2], 6.0);
    // Saddle q₁q₂ has Δf = 0 but is not minimal away from the origin.
    assert!(minimality_residual(&spec, &[vec![0.0, 0.0]]).unwrap() < 1e-15);
    assert!(minimality_residual(&spec, &[vec![1.0, 1.0]]).unwrap() > 1e-3);
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(matches!(
        make_immersion(&SurfaceSpec::catenoid(0.0)),
        Err(Error::InvalidSpec(_))
    ));
    assert!(matches!(
        make_immersion(&SurfaceSpec::helicoid(-1.0)),
        Err(Error::InvalidSpec(_))
    ));
    assert!(matches!(
        make_immersion(&SurfaceSpec::plane(1)),
        Err(Error::InvalidSpec(_))
    ));
    assert!(make_immersion(&SurfaceSpec::plane(2).with_radius(f64::INFINITY)).is_err());
}

#[test]
fn catenoid_inequality_grid() {
    let v = catenoid_inequalities(&[0.0, 0.5, 1.0, 10.0]).unwrap();
    assert!(v.strict_for_positive_t && v.equality_at_zero);
    let one = &v.rows[2];
    assert_relative_eq!(
        one.first_gap + 1.0,
        1.0_f64.sinh() * 1.0_f64.cosh(),
        epsilon = 1e-15
    );
    assert!((1.0_f64.sinh() * 1.0_f64.cosh() - 1.8134).abs() < 1e-4);
    let ten = &v.rows[3];
    assert!(ten.first_gap > 1e3 && ten.second_gap > 1e3);
    assert!(catenoid_inequalities(&[-1.0]).is_err());
}

#[test]
fn spec_json_round_trip() {
    let specs = [
        SurfaceSpec::plane(3).with_radius(20.0),
        SurfaceSpec::catenoid(2.0).with_t_max(6.0),
        SurfaceSpec::helicoid(1.5),
        SurfaceSpec::graph(GraphFamily::Scherk),
        SurfaceSpec::graph(GraphFamily::Linear {
            coeffs: vec![1.0, 2.0],
            offset: -1.0,
        }),
    ];
    for s in specs {
        let text = serde_json::to_string(&s).unwrap();
        let back: SurfaceSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s, "{text}");
    }
}
