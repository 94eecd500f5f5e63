//! Discrete Dirichlet-to-Neumann matrix on a sphere and on an ellipsoid.
//! On the sphere its eigenvalues reproduce the modal values; on either
//! surface none lies noticeably below the real axis.

use helmcert::geometry::{build_surface, quadrature_grid, SurfaceSpec};
use helmcert::mfs::{
    default_dtn_source_count, dtn_matrix, place_sources, DEFAULT_DTN_DEGREE, DEFAULT_DTN_RESOLUTION,
    DEFAULT_DTN_SHRINK,
};
use helmcert::mie::dtn_sphere_spectrum;

fn main() -> helmcert::Result<()> {
    let k = 1.0;
    let (nt, np) = DEFAULT_DTN_RESOLUTION;
    for spec in [SurfaceSpec::unit_sphere(), SurfaceSpec::Ellipsoid { a: 1.5, b: 1.0, c: 1.0 }] {
        let surface = build_surface(spec.clone())?;
        let grid = quadrature_grid(&surface, nt, np)?;
        let sources = place_sources(&surface, &grid, DEFAULT_DTN_SHRINK, default_dtn_source_count(grid.len()))?;
        let d = dtn_matrix(&grid, &sources, k, DEFAULT_DTN_DEGREE)?;
        println!(
            "{spec:?}: {} eigenvalues, Dirichlet defect {:.2e}, reliable {}, min Im {:.3e}",
            d.eigenvalues.len(),
            d.max_dirichlet_residual,
            d.reliable,
            d.min_imag()
        );
        if surface.sphere_radius().is_some() {
            let modal = dtn_sphere_spectrum(k, 1.0, DEFAULT_DTN_DEGREE)?;
            for (l, mu) in modal.eigenvalues.iter().enumerate() {
                let close = d.eigenvalues.iter().filter(|z| (*z - mu).norm() < 1e-3).count();
                println!("  l = {l}: mu = {mu:.8}, matched {close} of {}", 2 * l + 1);
            }
        } else {
            for z in d.eigenvalues.iter().take(6) {
                println!("  {z:.8}");
            }
            println!("  ...");
        }
    }
    Ok(())
}
