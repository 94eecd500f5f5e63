//! Verdict table of the a-priori plane-wave bounds for the impedance sphere
//! over a range of wavenumbers.

use helmcert::bounds::{verify_all, Instance, Resolutions};
use helmcert::geometry::{build_surface, SurfaceSpec, Vec3};
use helmcert::mie::{default_l_max, dtn_sphere_spectrum, mie_solve};
use num_complex::Complex64;

fn main() -> helmcert::Result<()> {
    let surface = build_surface(SurfaceSpec::unit_sphere())?;
    for gamma in [Complex64::new(0.0, 1.0), Complex64::new(1.0, 1.0)] {
        for k in [0.5, 1.0, 2.0, 4.0] {
            let sol = mie_solve(k, 1.0, gamma, Vec3::z(), default_l_max(k, 1.0))?;
            let spectrum = dtn_sphere_spectrum(k, 1.0, sol.l_max())?;
            let inst = Instance::build(
                format!("gamma={gamma} k={k}"),
                &sol,
                &surface,
                Vec3::z(),
                gamma.im,
                gamma.norm(),
                Resolutions::default(),
                Some(spectrum),
            )?;
            let table = verify_all(&inst)?;
            println!("{} (passes: {})", table.label, table.passes());
            for r in &table.rows {
                println!("  {:<15} {:>14.6e} <= {:<14.6e} {:?}", r.id, r.lhs, r.rhs, r.status);
            }
            for f in &table.findings {
                println!("  {:<15} {:>14.6e} <= {:<14.6e} {:?} (derived)", f.id, f.lhs, f.rhs, f.status);
            }
            for note in table.finding_notes() {
                println!("  finding: {note}");
            }
        }
    }
    Ok(())
}
