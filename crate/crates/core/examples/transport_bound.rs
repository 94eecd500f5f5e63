//! Transport cross section against its lower bound in terms of the total
//! cross section, for spheres of growing size.

use helmcert::bounds::{
    apriori_bounds, direction_grid, total_cross_section, transport_cross_section, FarFieldGrid,
};
use helmcert::geometry::Vec3;
use helmcert::mie::{default_l_max, mie_solve};
use num_complex::Complex64;
use std::f64::consts::PI;

fn main() -> helmcert::Result<()> {
    let gamma = Complex64::new(0.0, 1.0);
    let dirs = direction_grid(96, 192)?;
    println!("  kR    sigma        R            R/sigma  lower bound  proof form");
    for radius in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let k = 1.0;
        let sol = mie_solve(k, radius, gamma, Vec3::z(), default_l_max(k, radius))?;
        let ff = FarFieldGrid::sample(&dirs, k, Vec3::z(), |t| sol.far_field(t));
        let sigma = total_cross_section(&ff);
        let r = transport_cross_section(&ff);
        let b = apriori_bounds(k, gamma.im, gamma.norm(), 4.0 * PI * radius * radius)?;
        println!(
            "{:5.2}  {sigma:.5e}  {r:.5e}  {:.4}   {:.3e}    {:.3e}",
            k * radius,
            r / sigma,
            b.transport_lower_bound(sigma),
            b.transport_lower_bound_via_cap(sigma)
        );
    }
    Ok(())
}
