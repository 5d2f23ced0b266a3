use std::collections::HashMap;
use std::f64::consts::PI;

use minlap::geometry::BasePoint;
use minlap::meshing::{
    assemble, ball_mesh, extrinsic_ball_volume, integrate, to_off, triangulate, volume_density,
    QuadratureOptions, Region, TriMesh,
};
use minlap::sparse::EnvelopeCholesky;
use minlap::surfaces::{make_immersion, GraphFamily, SurfaceSpec};
use minlap::Error;

/// Exact catenoid ball volume about the origin: `2π(t_r + sinh t_r cosh t_r)`
/// with `cosh² t_r + t_r² = r²`.
fn catenoid_ball_volume(r: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, r);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m.cosh().powi(2) + m * m < r * r {
            lo = m;
        } else {
            hi = m;
        }
    }
    2.0 * PI * (lo + lo.sinh() * lo.cosh())
}

fn edge_use(mesh: &TriMesh) -> HashMap<(usize, usize), usize> {
    let mut edges = HashMap::new();
    for t in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    edges
}

#[test]
fn disk_counting_formula() {
    let imm = make_immersion(&SurfaceSpec::plane(2).with_radius(1.0)).unwrap();
    let mesh = triangulate(&imm, 4).unwrap();
    assert_eq!(mesh.vertex_count(), 41);
    for (q, b) in mesh.chart.iter().zip(&mesh.boundary) {
        let on_rim = ((q[0] * q[0] + q[1] * q[1]).sqrt() - 1.0).abs() < 1e-12;
        assert_eq!(on_rim, *b);
    }
    let big = triangulate(&imm, 70).unwrap();
    assert_eq!(big.vertex_count(), 1 + 2 * 70 * 71);
}

#[test]
fn catenoid_rectangle_is_seamless() {
    let imm = make_immersion(&SurfaceSpec::catenoid(1.0).with_t_max(1.0)).unwrap();
    let res = 12;
    let mesh = triangulate(&imm, res).unwrap();
    assert_eq!(mesh.vertex_count(), (res + 1) * res);
    let edges = edge_use(&mesh);
    assert!(edges.values().all(|&c| c == 1 || c == 2));
    // Annulus: V − E + F = 0.
    let chi = mesh.vertex_count() as i64 - edges.len() as i64 + mesh.triangle_count() as i64;
    assert_eq!(chi, 0);
    // Boundary vertices are exactly the two end circles.
    assert_eq!(mesh.boundary_count(), 2 * res);
}

#[test]
fn resolution_one_is_rejected() {
    let imm = make_immersion(&SurfaceSpec::catenoid(1.0)).unwrap();
    assert!(triangulate(&imm, 1).is_err());
}

#[test]
fn higher_dimensions_are_rejected() {
    let imm = make_immersion(&SurfaceSpec::plane(3)).unwrap();
    assert!(matches!(
        triangulate(&imm, 4),
        Err(Error::UnsupportedDimension { .. })
    ));
}

#[test]
fn helicoid_mesh_is_oriented() {
    // Coarse θ steps twist whole cells past a quarter turn; keep them small.
    let imm = make_immersion(&SurfaceSpec::helicoid(1.0)).unwrap();
    let mesh = triangulate(&imm, 48).unwrap();
    assert!(mesh
        .triangles
        .iter()
        .enumerate()
        .all(|(t, _)| mesh.triangle_area(t) > 1e-14));
}

#[test]
fn fem_pair_invariants() {
    for spec in [
        SurfaceSpec::catenoid(1.0).with_t_max(2.0),
        SurfaceSpec::helicoid(0.5),
        SurfaceSpec::plane(2).with_radius(3.0),
    ] {
        let imm = make_immersion(&spec).unwrap();
        let mesh = triangulate(&imm, 40).unwrap();
        let pair = assemble(&mesh).unwrap();
        assert!(pair.k.symmetry_defect() <= 1e-12);
        assert!(pair.m.symmetry_defect() <= 1e-12);
        let ones = vec![1.0; mesh.vertex_count()];
        let k1 = pair.k.mul_vec(&ones);
        let nrm = k1.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(nrm <= 1e-10 * pair.k.frobenius_norm());
        assert!(pair.rayleigh_quotient(&ones).abs() <= 1e-12);
        assert!(EnvelopeCholesky::factor(&pair.m).is_ok());
        // Mass of the constant equals the mesh area.
        assert!(
            (pair.m.quadratic_form(&ones) - mesh.total_area()).abs() <= 1e-10 * mesh.total_area()
        );
        // Stiffness is positive semidefinite on a pseudo-random vector.
        let v: Vec<f64> = (0..mesh.vertex_count())
            .map(|i| ((i * 37) % 11) as f64 - 5.0)
            .collect();
        assert!(pair.k.quadratic_form(&v) >= 0.0);
    }
}

#[test]
fn unit_square_two_triangles() {
    let mesh = TriMesh {
        chart: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        points: vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
        ],
        triangles: vec![[0, 1, 2], [0, 2, 3]],
        boundary: vec![true; 4],
        r_tilde: None,
    };
    let pair = assemble(&mesh).unwrap();
    let k1 = pair.k.mul_vec(&[1.0; 4]);
    assert!(k1.iter().all(|x| x.abs() < 1e-15));
}

#[test]
fn degenerate_triangle_is_reported() {
    let mesh = TriMesh {
        chart: vec![[0.0, 0.0]; 3],
        points: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]],
        triangles: vec![[0, 1, 2]],
        boundary: vec![true; 3],
        r_tilde: None,
    };
    assert!(matches!(
        assemble(&mesh),
        Err(Error::DegenerateTriangle { index: 0, .. })
    ));
}

#[test]
fn mesh_area_converges_at_second_order() {
    let imm = make_immersion(&SurfaceSpec::catenoid(1.0).with_t_max(1.0)).unwrap();
    let exact = 2.0 * PI * (1.0 + 2.0_f64.sinh() / 2.0);
    let mut errs = Vec::new();
    let mut edges = Vec::new();
    for res in [8, 16, 32] {
        let mesh = triangulate(&imm, res).unwrap();
        errs.push((exact - mesh.total_area()).abs());
        edges.push(mesh.max_edge_length());
    }
    for w in errs.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.9, "{errs:?}");
    }
    for w in edges.windows(2) {
        assert!((w[1] / w[0] - 0.5).abs() < 0.05, "{edges:?}");
    }
    // Quadrature agrees with the closed form.
    let q = integrate(
        &imm,
        &Region::ChartRectangle {
            lo: [-1.0, -PI],
            hi: [1.0, PI],
        },
        &QuadratureOptions::uniform(3),
        |q| [volume_density(&imm, q)],
        |_, _| [0.0],
    )
    .unwrap();
    assert!((q.domain[0] - exact).abs() < 1e-9);
}

#[test]
fn plane_and_tilted_plane_disks() {
    let plane = make_immersion(&SurfaceSpec::plane(2)).unwrap();
    let v =
        extrinsic_ball_volume(&plane, &BasePoint::on_surface(&plane, &[0.0, 0.0]), 1.0, 3).unwrap();
    assert!((v.volume - PI).abs() <= 1e-4);
    assert!(!v.truncated);

    let tilted = make_immersion(&SurfaceSpec::graph(GraphFamily::Linear {
        coeffs: vec![1.0, 0.0],
        offset: 0.0,
    }))
    .unwrap();
    let v = extrinsic_ball_volume(
        &tilted,
        &BasePoint::on_surface(&tilted, &[0.3, -0.2]),
        1.0,
        3,
    )
    .unwrap();
    assert!((v.volume - PI).abs() <= 1e-4);
}

#[test]
fn catenoid_volume_matches_closed_form() {
    let imm = make_immersion(&SurfaceSpec::catenoid(1.0)).unwrap();
    let o = BasePoint::origin(3);
    let mut last = 0.0;
    for r in [1.5, 5.0, 20.0] {
        let v = extrinsic_ball_volume(&imm, &o, r, 4).unwrap().volume;
        let exact = catenoid_ball_volume(r);
        assert!((v / exact - 1.0).abs() < 1e-4, "r={r}: {v} vs {exact}");
        assert!(v >= last);
        last = v;
    }
    let ratio = catenoid_ball_volume(20.0) / (PI * 400.0);
    assert!((1.85..=2.0).contains(&ratio));
}

#[test]
fn ball_missing_surface_has_zero_volume() {
    let imm = make_immersion(&SurfaceSpec::catenoid(1.0)).unwrap();
    let v = extrinsic_ball_volume(&imm, &BasePoint::origin(3), 0.5, 3).unwrap();
    assert_eq!(v.volume, 0.0);
}

#[test]
fn ball_leaving_the_chart_is_an_error() {
    let imm = make_immersion(&SurfaceSpec::catenoid(1.0).with_t_max(2.0)).unwrap();
    assert!(matches!(
        extrinsic_ball_volume(&imm, &BasePoint::origin(3), 10.0, 3),
        Err(Error::TruncationTooSmall { .. })
    ));
    let disk = make_immersion(&SurfaceSpec::plane(2).with_radius(1.0)).unwrap();
    let base = BasePoint::on_surface(&disk, &[0.0, 0.0]);
    assert!(matches!(
        extrinsic_ball_volume(&disk, &base, 1.5, 3),
        Err(Error::TruncationTooSmall { .. })
    ));
    assert!(extrinsic_ball_volume(&disk, &base, 0.9, 3).is_ok());
}

#[test]
fn divergence_theorem_on_polygonal_ball() {
    // X = (t, sin θ) on the catenoid chart, periodic across the seam;
    // √g div X = ∂ᵢ(√g Xⁱ).
    let imm = make_immersion(&SurfaceSpec::catenoid(1.0)).unwrap();
    let sqrt_g = |q: &[f64; 2]| q[0].cosh().powi(2);
    // One ball wraps the neck, the other is a topological disk off the seam.
    for (base, radius) in [
        (BasePoint::ambient(vec![0.5, 0.2, 0.3]), 3.0),
        (BasePoint::on_surface(&imm, &[2.0, 0.5]), 1.0),
    ] {
        let res = integrate(
            &imm,
            &Region::Ball { base, radius },
            &QuadratureOptions::adaptive(5),
            |q| [2.0 * q[0].cosh() * q[0].sinh() * q[0] + sqrt_g(q) * (1.0 + q[1].cos())],
            |q, tau| [sqrt_g(q) * (q[0] * tau[1] - q[1].sin() * tau[0])],
        )
        .unwrap();
        assert!(
            (res.domain[0] - res.boundary[0]).abs() < 1e-9 * res.domain[0].abs(),
            "{res:?}"
        );
    }
}

#[test]
fn quadrature_is_thread_count_invariant() {
    let imm = make_immersion(&SurfaceSpec::catenoid(1.0)).unwrap();
    let o = BasePoint::origin(3);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| extrinsic_ball_volume(&imm, &o, 7.0, 4).unwrap().volume)
    };
    let a = run(1);
    assert_eq!(a.to_bits(), run(1).to_bits());
    assert_eq!(a.to_bits(), run(3).to_bits());
}

#[test]
fn ball_mesh_boundary_lies_on_sphere() {
    let imm = make_immersion(&SurfaceSpec::catenoid(1.0)).unwrap();
    for base in [
        BasePoint::origin(3),
        BasePoint::on_surface(&imm, &[0.0, 0.0]),
    ] {
        let mesh = ball_mesh(&imm, &base, 1.5, 12).unwrap();
        let r = mesh.r_tilde.as_ref().unwrap();
        for (v, b) in r.iter().zip(&mesh.boundary) {
            if *b {
                assert!((v - 1.5).abs() < 1e-9);
            } else {
                assert!(*v < 1.5 + 1e-9);
            }
        }
    }
}

#[test]
fn off_export_has_header_and_counts() {
    let imm = make_immersion(&SurfaceSpec::plane(2).with_radius(1.0)).unwrap();
    let mesh = triangulate(&imm, 3).unwrap();
    let off = to_off(&mesh);
    let mut lines = off.lines();
    assert_eq!(lines.next(), Some("OFF"));
    assert_eq!(
        lines.next().unwrap(),
        format!("{} {} 0", mesh.vertex_count(), mesh.triangle_count())
    );
    assert_eq!(
        off.lines().count(),
        2 + mesh.vertex_count() + mesh.triangle_count()
    );
}
