//! Solve the impedance problem on the unit sphere by the method of
//! fundamental solutions and compare the residual-based certificates with
//! the true errors against the modal solution.

use helmcert::bounds::{certify, direction_grid, FarFieldGrid};
use helmcert::field::PlaneWave;
use helmcert::geometry::{build_surface, quadrature_grid, SurfaceSpec, Vec3};
use helmcert::impedance::Impedance;
use helmcert::mfs::{boundary_residual, place_sources, solve_impedance};
use helmcert::mie::{default_l_max, mie_solve};
use num_complex::Complex64;

fn main() -> helmcert::Result<()> {
    let k = 2.0;
    let gamma = Complex64::new(1.0, 1.0);
    let incident = Vec3::z();
    let surface = build_surface(SurfaceSpec::unit_sphere())?;
    let grid = quadrature_grid(&surface, 24, 48)?;
    let check = quadrature_grid(&surface, 40, 80)?;
    let dirs = direction_grid(32, 64)?;
    let exact = mie_solve(k, 1.0, gamma, incident, default_l_max(k, 1.0))?;
    let (ue, dnue) = exact.boundary_traces(&check)?;
    let ffe = FarFieldGrid::sample(&dirs, k, incident, |t| exact.far_field(t));

    let eta = Impedance::constant_scaled(k, gamma, &grid)?;
    let eta_check = Impedance::constant_scaled(k, gamma, &check)?;
    let wave = PlaneWave::new(k, incident);
    let rhs = wave.impedance_rhs(&grid, &eta);
    let rhs_check = wave.impedance_rhs(&check, &eta_check);

    println!("   M   |alpha|      bound u    error u    bound dnu  error dnu  bound ff^2 error ff^2");
    for m in [25, 50, 100, 200, 400] {
        let sources = place_sources(&surface, &grid, 0.7, m)?;
        let sol = solve_impedance(&grid, &sources, k, &eta, &rhs)?;
        let residual = boundary_residual(&sol, &check, &eta_check, &rhs_check)?;
        let (u, dnu) = sol.traces(&check)?;
        let du: Vec<_> = u.iter().zip(&ue).map(|(a, b)| a - b).collect();
        let ddn: Vec<_> = dnu.iter().zip(&dnue).map(|(a, b)| a - b).collect();
        let ff = FarFieldGrid::sample(&dirs, k, incident, |t| sol.far_field(t));
        let report = certify(&residual, k)?.with_oracle(
            check.l2_norm(&du)?,
            check.l2_norm(&ddn)?,
            ff.distance_sq(&ffe)?,
        );
        let o = report.oracle.expect("oracle attached");
        println!(
            "{m:4}  {:.3e}  {:.3e}  {:.3e}  {:.3e}  {:.3e}  {:.3e}  {:.3e}",
            report.residual_norm,
            report.bound_field,
            o.error_field,
            report.bound_normal_derivative,
            o.error_normal_derivative,
            report.bound_far_field_sq,
            o.error_far_field_sq
        );
    }
    Ok(())
}
