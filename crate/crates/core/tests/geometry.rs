use helmcert::geometry::{
    build_surface, l2_norm, quadrature_grid, BoundaryTrace, HarmonicCoefficient, SurfaceSpec, Vec3,
};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Area of the spheroid with semi-axis `a` along the symmetry axis and `b`
/// across it, as the integral of `2π y ds` over the generating meridian.
fn spheroid_area(a: f64, b: f64) -> f64 {
    let integrand = |t: f64| {
        let (s, c) = t.sin_cos();
        2.0 * PI * b * s * (a * a * s * s + b * b * c * c).sqrt()
    };
    adaptive_simpson(&integrand, 0.0, PI, 1e-13)
}

#[test]
fn prolate_area_matches_quadrature_oracle() {
    let oracle = spheroid_area(2.0, 1.0);
    let e = (1.0f64 - 0.25).sqrt();
    let closed = 2.0 * PI * (1.0 + 2.0 / e * e.asin());
    assert!((oracle - closed).abs() < 1e-11 * closed, "oracle {oracle} vs {closed}");

    let s = build_surface(SurfaceSpec::Ellipsoid { a: 2.0, b: 1.0, c: 1.0 }).unwrap();
    let g = quadrature_grid(&s, 32, 64).unwrap();
    assert!((g.area() - oracle).abs() < 1e-8 * oracle, "{} vs {oracle}", g.area());

    // axis of symmetry along z this time
    let s = build_surface(SurfaceSpec::Ellipsoid { a: 1.0, b: 1.0, c: 2.0 }).unwrap();
    let g = quadrature_grid(&s, 32, 64).unwrap();
    assert!((g.area() - oracle).abs() < 1e-8 * oracle);
}

#[test]
fn oblate_area_matches_quadrature_oracle() {
    let oracle = spheroid_area(0.6, 1.0);
    let s = build_surface(SurfaceSpec::Ellipsoid { a: 1.0, b: 1.0, c: 0.6 }).unwrap();
    let g = quadrature_grid(&s, 32, 64).unwrap();
    assert!((g.area() - oracle).abs() < 1e-8 * oracle);
}

fn bumpy() -> SurfaceSpec {
    SurfaceSpec::StarShaped {
        base_radius: 1.0,
        coefficients: vec![
            HarmonicCoefficient { l: 2, m: 0, value: 0.12 },
            HarmonicCoefficient { l: 3, m: 2, value: -0.08 },
            HarmonicCoefficient { l: 4, m: -1, value: 0.05 },
        ],
    }
}

#[test]
fn star_shaped_area_self_converges() {
    let s = build_surface(bumpy()).unwrap();
    let reference = quadrature_grid(&s, 96, 192).unwrap().area();
    let mut previous = f64::INFINITY;
    for n in [6, 12, 24, 48] {
        let err = (quadrature_grid(&s, n, 2 * n).unwrap().area() - reference).abs();
        assert!(err <= 1.1 * previous, "n = {n}: {err} after {previous}");
        previous = err;
    }
    assert!(previous < 1e-10 * reference);
}

#[test]
fn normals_point_away_from_centroid() {
    for spec in [
        bumpy(),
        SurfaceSpec::Ellipsoid { a: 1.5, b: 1.0, c: 0.7 },
        SurfaceSpec::Sphere { radius: 0.5 },
    ] {
        let s = build_surface(spec).unwrap();
        let g = quadrature_grid(&s, 16, 32).unwrap();
        for (x, n) in g.nodes.iter().zip(&g.normals) {
            assert!(((n.norm()) - 1.0).abs() < 1e-12);
            assert!(n.dot(&(x - g.centroid)) > 0.0);
        }
        assert!(g.weights.iter().all(|w| *w > 0.0));
    }
}

#[test]
fn finite_difference_tangents_are_orthogonal_to_normals() {
    let s = build_surface(bumpy()).unwrap();
    let g = quadrature_grid(&s, 12, 24).unwrap();
    let h = 1e-6;
    for ((theta, phi), n) in g.params.iter().zip(&g.normals) {
        let t1 = (s.point(theta + h, *phi) - s.point(theta - h, *phi)) / (2.0 * h);
        let t2 = (s.point(*theta, phi + h) - s.point(*theta, phi - h)) / (2.0 * h);
        assert!(t1.dot(n).abs() < 1e-8 * t1.norm().max(1.0));
        assert!(t2.dot(n).abs() < 1e-8 * t2.norm().max(1.0));
    }
}

#[test]
fn star_shape_crossing_zero_is_rejected() {
    let spec = SurfaceSpec::StarShaped {
        base_radius: 0.2,
        coefficients: vec![HarmonicCoefficient { l: 1, m: 0, value: 2.0 }],
    };
    assert!(build_surface(spec).is_err());
}

#[test]
fn trace_norms() {
    let s = build_surface(SurfaceSpec::unit_sphere()).unwrap();
    let g = quadrature_grid(&s, 16, 32).unwrap();
    let ones = vec![Complex64::new(1.0, 0.0); g.len()];
    assert!((l2_norm(&g, &ones).unwrap() - 2.0 * PI.sqrt()).abs() < 1e-12);
    let zeros = vec![Complex64::new(0.0, 0.0); g.len()];
    assert_eq!(BoundaryTrace::new(&g, &zeros).unwrap().l2_norm(), 0.0);
    assert!(BoundaryTrace::new(&g, &zeros[1..]).is_err());
    assert!(l2_norm(&g, &ones[..3]).is_err());
}

#[test]
fn grid_csv_has_one_row_per_node() {
    let s = build_surface(SurfaceSpec::unit_sphere()).unwrap();
    let g = quadrature_grid(&s, 4, 8).unwrap();
    let mut buf = Vec::new();
    g.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,z,nx,ny,nz,w"));
    assert_eq!(lines.count(), 32);
}

proptest! {
    #[test]
    fn ellipsoid_nodes_lie_on_the_ellipsoid(
        a in 0.3f64..3.0, b in 0.3f64..3.0, c in 0.3f64..3.0,
    ) {
        let s = build_surface(SurfaceSpec::Ellipsoid { a, b, c }).unwrap();
        let g = quadrature_grid(&s, 6, 12).unwrap();
        for x in &g.nodes {
            let q = (x.x / a).powi(2) + (x.y / b).powi(2) + (x.z / c).powi(2);
            prop_assert!((q - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_trace_norm_is_root_area(
        k in 0.1f64..10.0, t in 0.0f64..PI, p in 0.0f64..(2.0 * PI),
    ) {
        let s = build_surface(SurfaceSpec::Ellipsoid { a: 1.3, b: 0.9, c: 1.1 }).unwrap();
        let g = quadrature_grid(&s, 10, 20).unwrap();
        let d = Vec3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos());
        let v = g.sample(|x, _| Complex64::new(0.0, k * d.dot(x)).exp());
        let n = l2_norm(&g, &v).unwrap();
        prop_assert!((n - g.area().sqrt()).abs() < 1e-12 * n);
    }

    #[test]
    fn scaled_sphere_area(r in 0.1f64..5.0) {
        let s = build_surface(SurfaceSpec::Sphere { radius: r }).unwrap();
        let g = quadrature_grid(&s, 8, 16).unwrap();
        prop_assert!((g.area() - 4.0 * PI * r * r).abs() < 1e-12 * 4.0 * PI * r * r);
    }
}
