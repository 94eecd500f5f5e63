//! Build the supported surfaces, check their quadrature areas and export a
//! grid as CSV.
//!
//!     cargo run --example surfaces -- [grid.csv]

use helmcert::geometry::{build_surface, quadrature_grid, HarmonicCoefficient, SurfaceSpec};
use std::f64::consts::PI;

fn main() -> helmcert::Result<()> {
    let specs = [
        ("unit sphere", SurfaceSpec::unit_sphere()),
        ("ellipsoid (2,1,1)", SurfaceSpec::Ellipsoid { a: 2.0, b: 1.0, c: 1.0 }),
        (
            "bumpy sphere",
            SurfaceSpec::StarShaped {
                base_radius: 1.0,
                coefficients: vec![
                    HarmonicCoefficient { l: 2, m: 0, value: 0.15 },
                    HarmonicCoefficient { l: 3, m: 2, value: -0.05 },
                ],
            },
        ),
    ];
    for (name, spec) in specs {
        let surface = build_surface(spec)?;
        print!("{name:<20}");
        for n in [8, 16, 32] {
            let grid = quadrature_grid(&surface, n, 2 * n)?;
            print!("  area({n}x{}) = {:.14}", 2 * n, grid.area());
        }
        println!();
    }
    println!("exact unit sphere area   {:.14}", 4.0 * PI);

    if let Some(path) = std::env::args().nth(1) {
        let surface = build_surface(SurfaceSpec::Ellipsoid { a: 2.0, b: 1.0, c: 1.0 })?;
        let grid = quadrature_grid(&surface, 16, 32)?;
        grid.write_csv(std::fs::File::create(&path)?)?;
        println!("wrote {} nodes to {path}", grid.len());
    }
    Ok(())
}
