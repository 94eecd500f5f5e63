//! Impedance varying over an elongated ellipsoid. No exact solution exists,
//! so the residual certificate is the only error control; the a-priori
//! bounds are checked on the computed field.

use helmcert::bounds::{certify, verify_all, Instance, Resolutions};
use helmcert::field::PlaneWave;
use helmcert::geometry::{build_surface, quadrature_grid, SurfaceSpec, Vec3};
use helmcert::impedance::Impedance;
use helmcert::mfs::{boundary_residual, place_sources, solve_impedance};
use num_complex::Complex64;

fn main() -> helmcert::Result<()> {
    let k = 1.0;
    let incident = Vec3::new(1.0, 0.0, 1.0).normalize();
    let surface = build_surface(SurfaceSpec::Ellipsoid { a: 2.0, b: 1.0, c: 1.0 })?;
    let gamma = |theta: f64, _phi: f64| Complex64::new(0.0, 1.0 + 0.5 * theta.sin());
    let grid = quadrature_grid(&surface, 24, 48)?;
    let check = quadrature_grid(&surface, 48, 96)?;
    let eta = Impedance::from_fn_scaled(k, &grid, gamma)?;
    let eta_check = Impedance::from_fn_scaled(k, &check, gamma)?;
    let wave = PlaneWave::new(k, incident);

    let sources = place_sources(&surface, &grid, 0.7, 400)?;
    let sol = solve_impedance(&grid, &sources, k, &eta, &wave.impedance_rhs(&grid, &eta))?;
    let residual = boundary_residual(&sol, &check, &eta_check, &wave.impedance_rhs(&check, &eta_check))?;
    let cert = certify(&residual, k)?;
    println!("MFS with {} sources, effective rank {}", sources.len(), sol.effective_rank);
    println!("  |alpha|               = {:.4e}", cert.residual_norm);
    println!("  |u - u_h|            <= {:.4e}", cert.bound_field);
    println!("  |du/dn - du_h/dn|    <= {:.4e}", cert.bound_normal_derivative);
    println!("  |u_inf - u_h,inf|^2  <= {:.4e}", cert.bound_far_field_sq);

    let inst = Instance::build(
        "ellipsoid",
        &sol,
        &surface,
        incident,
        eta_check.eta0() / k,
        eta_check.eta_max() / k,
        Resolutions { boundary: (48, 96), sphere: (64, 128) },
        None,
    )?;
    let table = verify_all(&inst)?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}
