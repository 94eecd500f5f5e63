//! Plane-wave scattering by an impedance sphere: modal coefficients, far
//! field, total and transport cross sections.

use helmcert::bounds::{direction_grid, total_cross_section, transport_cross_section, FarFieldGrid};
use helmcert::geometry::Vec3;
use helmcert::mie::{default_l_max, mie_solve};
use num_complex::Complex64;

fn main() -> helmcert::Result<()> {
    let (k, radius) = (3.0, 1.0);
    let incident = Vec3::z();
    let dirs = direction_grid(64, 128)?;
    for gamma in [Complex64::new(0.0, 1.0), Complex64::new(1.0, 1.0), Complex64::new(0.2, 3.0)] {
        let sol = mie_solve(k, radius, gamma, incident, default_l_max(k, radius))?;
        let ff = FarFieldGrid::sample(&dirs, k, incident, |t| sol.far_field(t));
        let sigma = total_cross_section(&ff);
        println!("gamma = {gamma}: l_max = {}, tail = {:.1e}", sol.l_max(), sol.tail_ratio());
        println!(
            "  sigma (modal) = {:.12}, sigma (quadrature) = {:.12}, R = {:.12}, R/sigma = {:.4}",
            sol.modal_cross_section(),
            sigma,
            transport_cross_section(&ff),
            transport_cross_section(&ff) / sigma
        );
        for deg in [0, 45, 90, 135, 180] {
            let t = (deg as f64).to_radians();
            let u = sol.far_field(&Vec3::new(t.sin(), 0.0, t.cos()));
            println!("  |u_inf({deg:3} deg)| = {:.8}", u.norm());
        }
    }
    Ok(())
}
