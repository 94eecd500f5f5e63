use helmcert::bounds::{
    apriori_bounds, certify, direction_grid, far_field_from_traces, far_field_grid_from_traces,
    greens_identity_check, total_cross_section, transport_cross_section, FarFieldGrid,
};
use helmcert::bounds::far_field::{gradient_fd_error, random_directions, vector_norm};
use helmcert::cli::{verify_at, ExperimentConfig};
use helmcert::field::{kernel, PlaneWave};
use helmcert::geometry::{build_surface, quadrature_grid, BoundaryGrid, Surface, SurfaceSpec, Vec3};
use helmcert::impedance::Impedance;
use helmcert::mfs::{boundary_residual, place_sources, solve_impedance, MfsSolution};
use helmcert::mie::{default_l_max, dtn_sphere_spectrum, mie_solve, resolvent_check, MieSolution};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn unit_sphere() -> Surface {
    build_surface(SurfaceSpec::unit_sphere()).unwrap()
}

fn incident() -> Vec3 {
    Vec3::new(0.3, -0.2, 1.0).normalize()
}

fn mie(k: f64, gamma: Complex64) -> MieSolution {
    mie_solve(k, 1.0, gamma, incident(), default_l_max(k, 1.0)).unwrap()
}

struct Fit {
    grid: BoundaryGrid,
    eta: Impedance,
    rhs: Vec<Complex64>,
    sol: MfsSolution,
}

fn mfs_sphere(k: f64, gamma: Complex64, count: usize, res: (usize, usize)) -> Fit {
    let s = unit_sphere();
    let grid = quadrature_grid(&s, res.0, res.1).unwrap();
    let eta = Impedance::constant_scaled(k, gamma, &grid).unwrap();
    let rhs = PlaneWave::new(k, incident()).impedance_rhs(&grid, &eta);
    let sources = place_sources(&s, &grid, 0.7, count).unwrap();
    let sol = solve_impedance(&grid, &sources, k, &eta, &rhs).unwrap();
    Fit { grid, eta, rhs, sol }
}

fn max_rel(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

#[test]
fn parseval_for_modal_far_field() {
    let dirs = direction_grid(64, 128).unwrap();
    for (k, gamma) in [(0.5, c(0.0, 1.0)), (2.0, c(1.0, 1.0)), (5.0, c(0.2, 3.0))] {
        let sol = mie(k, gamma);
        let ff = FarFieldGrid::sample(&dirs, k, sol.incident, |t| sol.far_field(t));
        let sigma = total_cross_section(&ff);
        let modal = sol.modal_cross_section();
        assert!((sigma - modal).abs() < 1e-10 * modal, "k = {k}: {sigma} vs {modal}");
    }
}

#[test]
fn modal_far_field_matches_trace_representation() {
    let s = unit_sphere();
    let grid = quadrature_grid(&s, 48, 96).unwrap();
    let dirs = direction_grid(16, 32).unwrap();
    for k in [0.5, 1.0, 3.0] {
        let sol = mie(k, c(0.5, 1.5));
        let (u, dnu) = sol.boundary_traces(&grid).unwrap();
        let from_traces = far_field_grid_from_traces(&grid, &u, &dnu, k, sol.incident, &dirs).unwrap();
        let modal: Vec<Complex64> = dirs.directions.iter().map(|t| sol.far_field(t)).collect();
        assert!(max_rel(&from_traces.samples, &modal) < 1e-8, "k = {k}");
    }
}

#[test]
fn point_source_traces_oracles() {
    let s = unit_sphere();
    let grid = quadrature_grid(&s, 24, 48).unwrap();
    let k = 1.0;
    let origin = Vec3::zeros();
    let u = grid.sample(|x, _| kernel(k, x, &origin));
    // radial derivative of e^{ikr}/(4πr) at r = 1
    let dnu: Vec<Complex64> = u.iter().map(|v| v * c(-1.0, k)).collect();
    for t in random_directions(10, 3) {
        let f = far_field_from_traces(&grid, &u, &dnu, k, &t).unwrap();
        assert!((f - 1.0 / (4.0 * PI)).norm() < 1e-13);
    }
    let dirs = direction_grid(16, 32).unwrap();
    let ff = far_field_grid_from_traces(&grid, &u, &dnu, k, Vec3::z(), &dirs).unwrap();
    let g = greens_identity_check(&grid, &u, &dnu, &ff).unwrap();
    assert!((g.flux - k / (4.0 * PI)).abs() < 1e-13);
    assert!(g.defect < 1e-10);
}

#[test]
fn green_identity_for_modal_solutions() {
    let s = unit_sphere();
    let grid = quadrature_grid(&s, 32, 64).unwrap();
    let dirs = direction_grid(64, 128).unwrap();
    for k in [0.5, 1.0, 2.0, 5.0] {
        let sol = mie(k, c(0.0, 1.0));
        let (u, dnu) = sol.boundary_traces(&grid).unwrap();
        let ff = FarFieldGrid::sample(&dirs, k, sol.incident, |t| sol.far_field(t));
        let g = greens_identity_check(&grid, &u, &dnu, &ff).unwrap();
        assert!(g.defect < 1e-8, "k = {k}: {}", g.defect);
    }
}

#[test]
fn mfs_far_field_matches_traces_and_asymptotics() {
    let fit = mfs_sphere(2.0, c(1.0, 1.0), 200, (24, 48));
    let sol = &fit.sol;
    let fine = quadrature_grid(&unit_sphere(), 48, 96).unwrap();
    let (u, dnu) = sol.traces(&fine).unwrap();
    let dirs = direction_grid(12, 24).unwrap();
    let from_traces = far_field_grid_from_traces(&fine, &u, &dnu, sol.k, incident(), &dirs).unwrap();
    let direct: Vec<Complex64> = dirs.directions.iter().map(|t| sol.far_field(t)).collect();
    assert!(max_rel(&from_traces.samples, &direct) < 1e-8);

    let r = 1e4;
    for t in random_directions(8, 11) {
        let x = t * r;
        let v = sol.evaluate(&[x]).unwrap()[0] * r * c(0.0, -sol.k * r).exp();
        let f = sol.far_field(&t);
        assert!((v - f).norm() < 1e-3 * f.norm(), "{v} vs {f}");
    }
}

#[test]
fn mfs_error_stays_below_the_residual_certificate() {
    let (k, gamma) = (1.0, c(0.0, 1.0));
    let fit = mfs_sphere(k, gamma, 300, (24, 48));
    let exact = mie(k, gamma);
    let (u, _) = fit.sol.traces(&fit.grid).unwrap();
    let (ue, _) = exact.boundary_traces(&fit.grid).unwrap();
    let diff: Vec<Complex64> = u.iter().zip(&ue).map(|(a, b)| a - b).collect();
    let err = fit.grid.l2_norm(&diff).unwrap();
    let alpha = boundary_residual(&fit.sol, &fit.grid, &fit.eta, &fit.rhs).unwrap().norm;
    assert!(err <= alpha / (k * gamma.im), "{err} vs {alpha}");
    assert!(max_rel(&u, &ue) < 1e-3);
}

#[test]
fn residual_decreases_with_source_count() {
    let mut previous = f64::INFINITY;
    for m in [50, 100, 200, 400] {
        let fit = mfs_sphere(1.0, c(0.0, 1.0), m, (24, 48));
        let r = boundary_residual(&fit.sol, &fit.grid, &fit.eta, &fit.rhs).unwrap();
        assert!(r.norm < previous, "M = {m}: {} after {previous}", r.norm);
        previous = r.norm;
    }
}

#[test]
fn least_squares_coefficients_are_optimal() {
    let fit = mfs_sphere(1.0, c(1.0, 1.0), 50, (16, 32));
    assert_eq!(fit.sol.effective_rank, 50);
    let base = boundary_residual(&fit.sol, &fit.grid, &fit.eta, &fit.rhs).unwrap().norm;
    for j in 0..fit.sol.coefficients.len() {
        for delta in [c(1e-6, 0.0), c(-1e-6, 0.0), c(0.0, 1e-6), c(0.0, -1e-6)] {
            let mut p = fit.sol.clone();
            p.coefficients[j] += delta;
            let r = boundary_residual(&p, &fit.grid, &fit.eta, &fit.rhs).unwrap().norm;
            assert!(r >= base * (1.0 - 1e-14), "coefficient {j}, {delta}: {r} < {base}");
        }
    }
}

#[test]
fn certificates_dominate_true_errors() {
    let s = unit_sphere();
    let check = quadrature_grid(&s, 36, 72).unwrap();
    let dirs = direction_grid(32, 64).unwrap();
    for (k, gamma, m) in [(1.0, c(0.0, 1.0), 60), (2.0, c(0.2, 3.0), 120)] {
        let fit = mfs_sphere(k, gamma, m, (24, 48));
        let eta = Impedance::constant_scaled(k, gamma, &check).unwrap();
        let rhs = PlaneWave::new(k, incident()).impedance_rhs(&check, &eta);
        let residual = boundary_residual(&fit.sol, &check, &eta, &rhs).unwrap();
        let exact = mie(k, gamma);
        let (u, dnu) = fit.sol.traces(&check).unwrap();
        let (ue, dnue) = exact.boundary_traces(&check).unwrap();
        let du: Vec<Complex64> = u.iter().zip(&ue).map(|(a, b)| a - b).collect();
        let ddn: Vec<Complex64> = dnu.iter().zip(&dnue).map(|(a, b)| a - b).collect();
        let ff = FarFieldGrid::sample(&dirs, k, incident(), |t| fit.sol.far_field(t));
        let ffe = FarFieldGrid::sample(&dirs, k, incident(), |t| exact.far_field(t));
        let report = certify(&residual, k).unwrap().with_oracle(
            check.l2_norm(&du).unwrap(),
            check.l2_norm(&ddn).unwrap(),
            ff.distance_sq(&ffe).unwrap(),
        );
        let o = report.oracle.unwrap();
        assert!(o.all_at_least_one(), "k = {k}, γ = {gamma}: {o:?}");
        assert!(report.bound_field > 0.0);
    }
}

#[test]
fn analytic_gradients_match_finite_differences() {
    let dirs = random_directions(40, 5);
    let sol = mie(2.0, c(1.0, 1.0));
    assert!(gradient_fd_error(&sol, &dirs, 1e-5) < 1e-6);
    let fit = mfs_sphere(2.0, c(1.0, 1.0), 100, (16, 32));
    assert!(gradient_fd_error(&fit.sol, &dirs, 1e-5) < 1e-6);

    // trace representation of the modal field
    let grid = quadrature_grid(&unit_sphere(), 32, 64).unwrap();
    let (u, dnu) = sol.boundary_traces(&grid).unwrap();
    for t in &dirs[..10] {
        let g = helmcert::bounds::far_field_gradient(&grid, &u, &dnu, sol.k, t).unwrap();
        let gm = sol.far_field_gradient(t);
        let diff = [g[0] - gm[0], g[1] - gm[1], g[2] - gm[2]];
        assert!(vector_norm(&diff) < 1e-8 * vector_norm(&gm).max(1e-3));
        let radial = g[0] * t.x + g[1] * t.y + g[2] * t.z;
        assert!(radial.norm() < 1e-12);
    }
}

#[test]
fn modal_solutions_respect_a_priori_bounds() {
    let s = unit_sphere();
    let grid = quadrature_grid(&s, 32, 64).unwrap();
    let dirs = direction_grid(48, 96).unwrap();
    for k in [0.5, 1.0, 2.0, 4.0] {
        for gamma in [c(0.0, 1.0), c(1.0, 1.0)] {
            let sol = mie(k, gamma);
            let b = apriori_bounds(k, gamma.im, gamma.norm(), grid.area()).unwrap();
            let (u, dnu) = sol.boundary_traces(&grid).unwrap();
            let ff = FarFieldGrid::sample(&dirs, k, sol.incident, |t| sol.far_field(t));
            let sigma = total_cross_section(&ff);
            let transport = transport_cross_section(&ff);
            assert!(sigma <= b.stated.f3.min(b.derived.alm1));
            assert!(grid.l2_norm(&u).unwrap() <= b.stated.f1);
            assert!(grid.l2_norm(&dnu).unwrap() <= b.stated.f2.min(b.derived.lastlast));
            assert!(ff.max_amplitude() <= b.amplitude_cap);
            let grad = dirs
                .directions
                .iter()
                .map(|t| vector_norm(&sol.far_field_gradient(t)))
                .fold(0.0, f64::max);
            assert!(grad <= b.stated.f4);
            assert!(transport >= b.transport_lower_bound(sigma));
            let ratio = transport / sigma;
            assert!((0.0..=2.0).contains(&ratio));
        }
    }
}

#[test]
fn resolvent_sweep_on_the_sphere() {
    for k in [0.5, 1.0, 2.0, 5.0] {
        for r in [0.5, 1.0, 2.0] {
            let spec = dtn_sphere_spectrum(k, r, 60).unwrap();
            for i in 0..=40 {
                let a = -20.0 + i as f64;
                for b in [0.1, 1.0, 10.0] {
                    assert!(resolvent_check(&spec, a, b).unwrap().holds);
                }
            }
        }
    }
    assert!(resolvent_check(&dtn_sphere_spectrum(1.0, 1.0, 5).unwrap(), 0.0, 0.0).is_err());
}

#[test]
fn variable_impedance_ellipsoid_passes_every_row() {
    let cfg = ExperimentConfig::from_toml_str(
        r#"
        k = [1.0]
        [surface]
        kind = "ellipsoid"
        a = 1.5
        b = 1.0
        c = 0.8
        [impedance]
        gamma = "i*(1 + 0.5*sin(theta))"
        [resolution]
        grid = [20, 40]
        sphere = [32, 64]
        "#,
    )
    .unwrap();
    let p = cfg.prepare().unwrap();
    let table = verify_at(&p, 1.0).unwrap();
    assert!(table.label.starts_with("mfs"));
    for row in &table.rows {
        assert!(row.pass(), "{row:?}");
    }
    assert!(table.passes());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sphere_spectrum_sits_in_upper_half_plane(k in 0.05f64..20.0, r in 0.1f64..3.0) {
        let spec = dtn_sphere_spectrum(k, r, 60).unwrap();
        for (l, mu) in spec.eigenvalues.iter().enumerate() {
            prop_assert!(mu.im > 0.0);
            let w = spec.wronskian_imag(l);
            prop_assert!((mu.im - w).abs() <= 1e-10 * mu.im);
        }
    }

    #[test]
    fn far_field_depends_only_on_angle_to_incidence(
        t in 0.0f64..PI, p in 0.0f64..(2.0 * PI), spin in 0.0f64..(2.0 * PI),
    ) {
        let sol = mie(1.5, c(0.4, 2.0));
        let th = Vec3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos());
        let axis = sol.incident;
        let rot = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), spin);
        let a = sol.far_field(&th);
        let b = sol.far_field(&(rot * th));
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-6));
    }
}
