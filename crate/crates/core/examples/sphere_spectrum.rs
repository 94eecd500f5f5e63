//! Eigenvalues of the exterior DtN map on a sphere and the resolvent margin
//! `|μ_l + a + ib| ≥ b` for shifts in the lower half-plane.

use helmcert::mie::{dtn_sphere_spectrum, resolvent_check};

fn main() -> helmcert::Result<()> {
    let (k, radius) = (2.0, 1.0);
    let spec = dtn_sphere_spectrum(k, radius, 12)?;
    println!(" l   Re mu_l            Im mu_l            1/(kR^2|h_l|^2)");
    for (l, mu) in spec.eigenvalues.iter().enumerate() {
        println!("{l:2}   {:+.10e}  {:+.10e}  {:.10e}", mu.re, mu.im, spec.wronskian_imag(l));
    }

    println!("\nresolvent margins (min over modes of |mu_l + a + ib| - b):");
    for b in [0.1, 1.0, 10.0] {
        let worst = (-20..=20)
            .map(|a| resolvent_check(&spec, a as f64, b))
            .collect::<helmcert::Result<Vec<_>>>()?
            .into_iter()
            .min_by(|x, y| x.margin().total_cmp(&y.margin()))
            .expect("non-empty sweep");
        println!(
            "  b = {b:>4}: worst a = {:+.0}, mode l = {}, margin = {:.3e}",
            worst.a,
            worst.worst_mode,
            worst.margin()
        );
    }
    Ok(())
}
