//! Exact scattering by an impedance sphere.
//!
//! The scattered field is `u(r) = Σ a_l h_l(k|r|) P_l(r̂·θ₀)` with
//!
//! ```text
//! a_l = -i^l (2l+1) (k j'_l(kR) + kγ j_l(kR)) / (k h'_l(kR) + kγ h_l(kR))
//! ```
//!
//! so that `(∂/∂n + kγ)(u + e^{ik r·θ₀}) = 0` on `|r| = R`. Normals point
//! out of the sphere, into the exterior domain. With that orientation the
//! DtN eigenvalues `μ_l = k h'_l(kR)/h_l(kR)` have positive imaginary part.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::field::RadiatingField;
use crate::geometry::{BoundaryGrid, Vec3};
use crate::special::{legendre_unchecked, legendre_with_derivatives, radial_table};

/// Truncation order used when the caller does not pick one.
pub fn default_l_max(k: f64, radius: f64) -> usize {
    (k * radius).ceil() as usize + 30
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be > 0, got {v}")))
    }
}

/// `i^l` without accumulating rounding.
fn i_pow(l: usize) -> Complex64 {
    match l % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Eigenvalues of the exterior DtN map on a sphere.
#[derive(Debug, Clone, Serialize)]
pub struct DtnSphereSpectrum {
    pub k: f64,
    pub radius: f64,
    pub eigenvalues: Vec<Complex64>,
    hankel_moduli: Vec<f64>,
}

impl DtnSphereSpectrum {
    pub fn l_max(&self) -> usize {
        self.eigenvalues.len() - 1
    }

    /// `1/(k R² |h_l(kR)|²)`, the imaginary part predicted by the Wronskian.
    pub fn wronskian_imag(&self, l: usize) -> f64 {
        let h = self.hankel_moduli[l];
        1.0 / (self.k * self.radius * self.radius * h * h)
    }
}

pub fn dtn_sphere_spectrum(k: f64, radius: f64, l_max: usize) -> Result<DtnSphereSpectrum> {
    check_positive("k", k)?;
    check_positive("radius", radius)?;
    let table = radial_table(l_max, k * radius)?;
    let eigenvalues = (0..=l_max).map(|l| k * table.dh(l) / table.h(l)).collect();
    let hankel_moduli = (0..=l_max).map(|l| table.h(l).norm()).collect();
    Ok(DtnSphereSpectrum {
        k,
        radius,
        eigenvalues,
        hankel_moduli,
    })
}

/// Outcome of checking `|μ_l + a + ib| ≥ b` over all modes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResolventMargin {
    pub a: f64,
    pub b: f64,
    /// `min_l |μ_l + a + ib|`.
    pub min_distance: f64,
    pub worst_mode: usize,
    pub holds: bool,
}

impl ResolventMargin {
    pub fn margin(&self) -> f64 {
        self.min_distance - self.b
    }
}

pub fn resolvent_check(spectrum: &DtnSphereSpectrum, a: f64, b: f64) -> Result<ResolventMargin> {
    if !(b > 0.0) {
        return Err(domain(format!("b > 0 required, got {b}")));
    }
    let shift = Complex64::new(a, b);
    let (worst_mode, min_distance) = spectrum
        .eigenvalues
        .iter()
        .map(|mu| (mu + shift).norm())
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (l, d)| if d < acc.1 { (l, d) } else { acc });
    Ok(ResolventMargin {
        a,
        b,
        min_distance,
        worst_mode,
        holds: min_distance >= b,
    })
}

/// Modal solution for plane-wave incidence on an impedance sphere.
#[derive(Debug, Clone, Serialize)]
pub struct MieSolution {
    pub k: f64,
    pub radius: f64,
    pub gamma: Complex64,
    pub incident: Vec3,
    pub coefficients: Vec<Complex64>,
}

/// Largest `|a_{l_max}| / max_l |a_l|` accepted as adequate truncation.
pub const TAIL_TOLERANCE: f64 = 1e-12;

pub fn mie_solve(
    k: f64,
    radius: f64,
    gamma: Complex64,
    incident: Vec3,
    l_max: usize,
) -> Result<MieSolution> {
    check_positive("k", k)?;
    check_positive("radius", radius)?;
    if !(gamma.im > 0.0) {
        return Err(Error::Impedance { min_imag: gamma.im });
    }
    let norm = incident.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(domain("incident direction must be a nonzero vector"));
    }
    let table = radial_table(l_max, k * radius)?;
    let mut coefficients = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        let num = k * table.dj[l] + k * gamma * table.j[l];
        let den = k * table.dh(l) + k * gamma * table.h(l);
        if den.norm() == 0.0 || !den.is_finite() {
            return Err(domain(format!("singular modal denominator at l = {l}")));
        }
        coefficients.push(-i_pow(l) * (2 * l + 1) as f64 * num / den);
    }
    let sol = MieSolution {
        k,
        radius,
        gamma,
        incident: incident / norm,
        coefficients,
    };
    let tail = sol.tail_ratio();
    if tail > TAIL_TOLERANCE {
        return Err(domain(format!(
            "l_max = {l_max} truncates the modal series: tail ratio {tail:e}"
        )));
    }
    Ok(sol)
}

impl MieSolution {
    pub fn l_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `|a_{l_max}| / max_l |a_l|`, zero for the trivial solution.
    pub fn tail_ratio(&self) -> f64 {
        let max = self.coefficients.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            0.0
        } else {
            self.coefficients[self.l_max()].norm() / max
        }
    }

    /// The same problem with incident amplitude `amplitude` instead of 1.
    pub fn with_amplitude(mut self, amplitude: Complex64) -> Self {
        for a in self.coefficients.iter_mut() {
            *a *= amplitude;
        }
        self
    }

    /// Far-field pattern `u_∞(θ) = (1/k) Σ (-i)^{l+1} a_l P_l(θ·θ₀)`.
    pub fn far_field(&self, theta: &Vec3) -> Complex64 {
        let t = theta.dot(&self.incident).clamp(-1.0, 1.0);
        let p = legendre_unchecked(self.l_max(), t);
        self.coefficients
            .iter()
            .enumerate()
            .map(|(l, a)| i_pow(l + 1).conj() * a * p[l])
            .sum::<Complex64>()
            / self.k
    }

    /// Tangential gradient of the far field at the unit direction `θ`.
    pub fn far_field_gradient(&self, theta: &Vec3) -> [Complex64; 3] {
        let t = theta.dot(&self.incident).clamp(-1.0, 1.0);
        let (_, dp) = legendre_with_derivatives(self.l_max(), t).expect("clamped argument");
        let scalar: Complex64 = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(l, a)| i_pow(l + 1).conj() * a * dp[l])
            .sum::<Complex64>()
            / self.k;
        let tangent = self.incident - theta * t;
        [scalar * tangent.x, scalar * tangent.y, scalar * tangent.z]
    }

    /// `σ = Σ 4π |a_l|² / (k² (2l+1))`.
    pub fn modal_cross_section(&self) -> f64 {
        let k2 = self.k * self.k;
        self.coefficients
            .iter()
            .enumerate()
            .map(|(l, a)| 4.0 * std::f64::consts::PI * a.norm_sqr() / (k2 * (2 * l + 1) as f64))
            .sum()
    }

    /// Scattered field at an exterior point `|r| ≥ R`.
    pub fn field(&self, r: &Vec3) -> Result<Complex64> {
        let rho = r.norm();
        if rho < self.radius * (1.0 - 1e-12) {
            return Err(domain(format!("point at radius {rho} lies inside the sphere")));
        }
        let table = radial_table(self.l_max(), self.k * rho)?;
        let t = (r.dot(&self.incident) / rho).clamp(-1.0, 1.0);
        let p = legendre_unchecked(self.l_max(), t);
        Ok(self
            .coefficients
            .iter()
            .enumerate()
            .map(|(l, a)| a * table.h(l) * p[l])
            .sum())
    }

    /// Scattered-field traces `(u, ∂u/∂n)` on a grid lying on the sphere.
    pub fn boundary_traces(&self, grid: &BoundaryGrid) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let tol = 1e-12 * self.radius.max(1.0);
        let deviation = grid
            .nodes
            .iter()
            .map(|x| (x.norm() - self.radius).abs())
            .fold(0.0, f64::max);
        if deviation > tol {
            return Err(Error::GridMismatch {
                radius: self.radius,
                deviation,
            });
        }
        let table = radial_table(self.l_max(), self.k * self.radius)?;
        let radial: Vec<Complex64> = (0..=self.l_max())
            .map(|l| self.coefficients[l] * table.h(l))
            .collect();
        let radial_d: Vec<Complex64> = (0..=self.l_max())
            .map(|l| self.coefficients[l] * self.k * table.dh(l))
            .collect();
        let mut u = Vec::with_capacity(grid.len());
        let mut dnu = Vec::with_capacity(grid.len());
        for x in &grid.nodes {
            let t = (x.dot(&self.incident) / x.norm()).clamp(-1.0, 1.0);
            let p = legendre_unchecked(self.l_max(), t);
            u.push(radial.iter().zip(&p).map(|(c, pl)| c * pl).sum());
            dnu.push(radial_d.iter().zip(&p).map(|(c, pl)| c * pl).sum());
        }
        Ok((u, dnu))
    }
}

impl RadiatingField for MieSolution {
    fn wavenumber(&self) -> f64 {
        self.k
    }

    fn traces(&self, grid: &BoundaryGrid) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        self.boundary_traces(grid)
    }

    fn far_field(&self, theta: &Vec3) -> Complex64 {
        MieSolution::far_field(self, theta)
    }

    fn far_field_gradient(&self, theta: &Vec3) -> [Complex64; 3] {
        MieSolution::far_field_gradient(self, theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PlaneWave;
    use crate::geometry::{build_surface, quadrature_grid, SurfaceSpec};
    use crate::impedance::Impedance;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn z() -> Vec3 {
        Vec3::new(0.0, 0.0, 1.0)
    }

    #[test]
    fn monopole_eigenvalue_closed_form() {
        let s = dtn_sphere_spectrum(1.0, 1.0, 4).unwrap();
        assert!((s.eigenvalues[0] - Complex64::new(-1.0, 1.0)).norm() < 1e-14);
        let s = dtn_sphere_spectrum(2.5, 0.7, 0).unwrap();
        let expect = Complex64::new(-1.0 / 0.7, 2.5);
        assert!((s.eigenvalues[0] - expect).norm() < 1e-13);
    }

    #[test]
    fn high_modes_behave_like_static_limit() {
        let (k, r) = (1.5, 1.0);
        let s = dtn_sphere_spectrum(k, r, 40).unwrap();
        let start = (2.0 * k * r).ceil() as usize;
        for l in start..40 {
            let mu = s.eigenvalues[l];
            assert!(mu.re < 0.0 && mu.im > 0.0);
            assert!(s.eigenvalues[l + 1].im < mu.im);
        }
        let mu = s.eigenvalues[30];
        assert!((mu.re + 31.0).abs() / 31.0 < 0.01);
    }

    #[test]
    fn resolvent_example_and_errors() {
        let s = dtn_sphere_spectrum(1.0, 1.0, 10).unwrap();
        let m = resolvent_check(&s, 0.0, 1.0).unwrap();
        assert!(m.holds);
        assert!(m.min_distance <= 5f64.sqrt() + 1e-14);
        assert_eq!(
            resolvent_check(&s, 0.0, 0.0).unwrap_err(),
            Error::Domain("b > 0 required, got 0".into())
        );
        assert!(resolvent_check(&s, 1.0, -1.0).is_err());
        let tiny = resolvent_check(&s, 3.0, 1e-300).unwrap();
        assert!(tiny.holds);
    }

    #[test]
    fn rejects_nonpositive_imaginary_impedance() {
        assert!(matches!(
            mie_solve(1.0, 1.0, Complex64::new(1.0, 0.0), z(), 20),
            Err(Error::Impedance { .. })
        ));
        assert!(mie_solve(1.0, 1.0, Complex64::new(0.0, -1.0), z(), 20).is_err());
        assert!(mie_solve(-1.0, 1.0, I, z(), 20).is_err());
    }

    #[test]
    fn short_truncation_rejected() {
        assert!(mie_solve(10.0, 1.0, I, z(), 5).is_err());
        assert!(mie_solve(10.0, 1.0, I, z(), default_l_max(10.0, 1.0)).is_ok());
    }

    #[test]
    fn dirichlet_limit() {
        let (k, r) = (1.3, 0.9);
        let l_max = default_l_max(k, r);
        let sol = mie_solve(k, r, Complex64::new(0.0, 1e6), z(), l_max).unwrap();
        let table = radial_table(l_max, k * r).unwrap();
        for l in 0..=12 {
            let expect = -i_pow(l) * (2 * l + 1) as f64 * table.j[l] / table.h(l);
            let rel = (sol.coefficients[l] - expect).norm() / expect.norm();
            assert!(rel < 1e-4, "l={l}: rel {rel}");
        }
    }

    #[test]
    fn tail_decays_at_default_truncation() {
        for &(k, r) in &[(0.5, 1.0), (1.0, 1.0), (5.0, 2.0)] {
            let sol = mie_solve(k, r, I, z(), default_l_max(k, r)).unwrap();
            assert!(sol.tail_ratio() <= 1e-12);
        }
    }

    #[test]
    fn traces_satisfy_boundary_condition() {
        let (k, r, gamma) = (1.0, 1.0, I);
        let sol = mie_solve(k, r, gamma, z(), default_l_max(k, r)).unwrap();
        let surf = build_surface(SurfaceSpec::Sphere { radius: r }).unwrap();
        let grid = quadrature_grid(&surf, 16, 32).unwrap();
        let (u, dnu) = sol.boundary_traces(&grid).unwrap();
        let imp = Impedance::constant_scaled(k, gamma, &grid).unwrap();
        let rhs = PlaneWave::new(k, z()).impedance_rhs(&grid, &imp);
        let residual: Vec<Complex64> = (0..grid.len())
            .map(|i| dnu[i] + imp.eta(i) * u[i] - rhs[i])
            .collect();
        assert!(grid.l2_norm(&residual).unwrap() <= 1e-9);
    }

    #[test]
    fn grid_off_sphere_rejected() {
        let sol = mie_solve(1.0, 1.0, I, z(), 31).unwrap();
        let surf = build_surface(SurfaceSpec::Sphere { radius: 1.1 }).unwrap();
        let grid = quadrature_grid(&surf, 6, 12).unwrap();
        assert!(matches!(
            sol.boundary_traces(&grid),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn zero_amplitude_gives_zero_traces() {
        let sol = mie_solve(1.0, 1.0, I, z(), 31)
            .unwrap()
            .with_amplitude(Complex64::new(0.0, 0.0));
        let surf = build_surface(SurfaceSpec::unit_sphere()).unwrap();
        let grid = quadrature_grid(&surf, 6, 12).unwrap();
        let (u, dnu) = sol.boundary_traces(&grid).unwrap();
        assert!(u.iter().chain(&dnu).all(|v| *v == Complex64::new(0.0, 0.0)));
        assert_eq!(sol.tail_ratio(), 0.0);
    }

    #[test]
    fn far_field_is_axisymmetric() {
        let dir = Vec3::new(0.3, -0.4, 0.8).normalize();
        let sol = mie_solve(2.0, 1.0, Complex64::new(1.0, 1.0), dir, 32).unwrap();
        // any direction at fixed angle to the incident one
        let perp = dir.cross(&Vec3::new(1.0, 0.0, 0.0)).normalize();
        let perp2 = dir.cross(&perp);
        let angle = 0.9f64;
        let base = sol.far_field(&(dir * angle.cos() + perp * angle.sin()));
        for q in 0..8 {
            let psi = q as f64 * 0.7;
            let t = perp * psi.cos() + perp2 * psi.sin();
            let v = sol.far_field(&(dir * angle.cos() + t * angle.sin()));
            assert!((v - base).norm() < 1e-13 * base.norm().max(1.0));
        }
    }

    #[test]
    fn exterior_field_matches_trace_on_boundary() {
        let sol = mie_solve(1.5, 1.0, Complex64::new(0.2, 3.0), z(), 32).unwrap();
        let surf = build_surface(SurfaceSpec::unit_sphere()).unwrap();
        let grid = quadrature_grid(&surf, 6, 12).unwrap();
        let (u, _) = sol.boundary_traces(&grid).unwrap();
        for (x, ui) in grid.nodes.iter().zip(&u).take(10) {
            assert!((sol.field(x).unwrap() - ui).norm() < 1e-12);
        }
        assert!(sol.field(&Vec3::new(0.0, 0.0, 0.5)).is_err());
    }
}
