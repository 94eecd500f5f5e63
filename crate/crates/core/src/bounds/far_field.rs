//! Far-field patterns on the unit sphere of directions.
//!
//! The representation used for arbitrary boundary traces is
//!
//! ```text
//! u_∞(θ) = -1/(4π) ∫_{∂Ω} (∂u/∂n + ik (n·θ) u) e^{-ik θ·r} dS(r)
//! ```
//!
//! with `n` pointing out of the obstacle and `u ~ u_∞ e^{ikr}/r`. Its
//! tangential gradient is obtained by differentiating the kernel in
//! `θ` and projecting onto the tangent plane at `θ`.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::RadiatingField;
use crate::geometry::{BoundaryGrid, Vec3};
use crate::special::gauss_legendre;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Gauss–Legendre × trapezoid quadrature on `S²` (polar axis `z`).
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGrid {
    pub directions: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub resolution: (usize, usize),
}

pub const DEFAULT_SPHERE_RESOLUTION: (usize, usize) = (64, 128);

pub fn direction_grid(n_theta: usize, n_phi: usize) -> Result<DirectionGrid> {
    if n_theta < 4 || n_phi < 8 {
        return Err(Error::Resolution { n_theta, n_phi });
    }
    let (t, w) = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut directions = Vec::with_capacity(n_theta * n_phi);
    let mut weights = Vec::with_capacity(n_theta * n_phi);
    for (ti, wi) in t.iter().zip(&w).rev() {
        let st = (1.0 - ti * ti).max(0.0).sqrt();
        for q in 0..n_phi {
            let (sp, cp) = (q as f64 * dphi).sin_cos();
            directions.push(Vec3::new(st * cp, st * sp, *ti));
            weights.push(wi * dphi);
        }
    }
    Ok(DirectionGrid {
        directions,
        weights,
        resolution: (n_theta, n_phi),
    })
}

impl DirectionGrid {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// Sampled scattering amplitude on a direction grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldGrid {
    pub directions: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub samples: Vec<Complex64>,
    pub incident: Vec3,
    pub k: f64,
}

impl FarFieldGrid {
    /// Evaluate `f` at every direction of `grid` (in parallel; order preserved).
    pub fn sample<F>(grid: &DirectionGrid, k: f64, incident: Vec3, f: F) -> Self
    where
        F: Fn(&Vec3) -> Complex64 + Sync,
    {
        let samples = grid.directions.par_iter().map(&f).collect();
        FarFieldGrid {
            directions: grid.directions.clone(),
            weights: grid.weights.clone(),
            samples,
            incident: incident.normalize(),
            k,
        }
    }

    pub fn from_samples(
        grid: &DirectionGrid,
        k: f64,
        incident: Vec3,
        samples: Vec<Complex64>,
    ) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        Ok(FarFieldGrid {
            directions: grid.directions.clone(),
            weights: grid.weights.clone(),
            samples,
            incident: incident.normalize(),
            k,
        })
    }

    pub fn max_amplitude(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    /// `‖self - other‖²_{L²(S²)}` on a shared grid.
    pub fn distance_sq(&self, other: &FarFieldGrid) -> Result<f64> {
        if self.samples.len() != other.samples.len() {
            return Err(Error::LengthMismatch {
                expected: self.samples.len(),
                got: other.samples.len(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(self.samples.iter().zip(&other.samples))
            .map(|(w, (a, b))| w * (a - b).norm_sqr())
            .sum())
    }
}

/// `σ = ∫_{S²} |u_∞|² dμ`.
pub fn total_cross_section(ff: &FarFieldGrid) -> f64 {
    ff.weights
        .iter()
        .zip(&ff.samples)
        .map(|(w, s)| w * s.norm_sqr())
        .sum()
}

/// `R = ∫_{S²} (1 - θ·θ₀) |u_∞(θ)|² dμ`.
pub fn transport_cross_section(ff: &FarFieldGrid) -> f64 {
    ff.weights
        .iter()
        .zip(ff.samples.iter().zip(&ff.directions))
        .map(|(w, (s, d))| w * (1.0 - d.dot(&ff.incident)) * s.norm_sqr())
        .sum()
}

fn check_traces(grid: &BoundaryGrid, u: &[Complex64], dnu: &[Complex64]) -> Result<()> {
    for n in [u.len(), dnu.len()] {
        if n != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: n,
            });
        }
    }
    Ok(())
}

fn far_field_unchecked(
    grid: &BoundaryGrid,
    u: &[Complex64],
    dnu: &[Complex64],
    k: f64,
    theta: &Vec3,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..grid.len() {
        let x = &grid.nodes[i];
        let n = &grid.normals[i];
        let phase = (-I * k * theta.dot(x)).exp();
        acc += (dnu[i] + I * k * n.dot(theta) * u[i]) * phase * grid.weights[i];
    }
    -acc / (4.0 * PI)
}

/// Scattering amplitude in direction `θ` from the boundary traces of a
/// radiating field,
/// `u_∞(θ) = -(1/4π) ∫ (∂u/∂n + ik (n·θ) u) e^{-ik θ·r} dS`
/// with `n` pointing out of the obstacle, so that `u ~ e^{ikr}/r · u_∞`.
pub fn far_field_from_traces(
    grid: &BoundaryGrid,
    u: &[Complex64],
    dnu: &[Complex64],
    k: f64,
    theta: &Vec3,
) -> Result<Complex64> {
    check_traces(grid, u, dnu)?;
    Ok(far_field_unchecked(grid, u, dnu, k, theta))
}

/// Far field from traces on every direction of `dirs`.
pub fn far_field_grid_from_traces(
    grid: &BoundaryGrid,
    u: &[Complex64],
    dnu: &[Complex64],
    k: f64,
    incident: Vec3,
    dirs: &DirectionGrid,
) -> Result<FarFieldGrid> {
    check_traces(grid, u, dnu)?;
    Ok(FarFieldGrid::sample(dirs, k, incident, |theta| {
        far_field_unchecked(grid, u, dnu, k, theta)
    }))
}

fn tangential(v: &Vec3, theta: &Vec3) -> Vec3 {
    v - theta * v.dot(theta)
}

/// Tangential gradient `∇_θ u_∞(θ)` of the trace representation.
///
/// Per node the derivative of the integrand is
/// `-(ik n⊥ u - ik x⊥ (∂u/∂n + ik (n·θ) u))` times the phase, with `v⊥` the
/// projection of `v` onto the tangent plane at `θ`.
pub fn far_field_gradient(
    grid: &BoundaryGrid,
    u: &[Complex64],
    dnu: &[Complex64],
    k: f64,
    theta: &Vec3,
) -> Result<[Complex64; 3]> {
    check_traces(grid, u, dnu)?;
    let theta = theta.normalize();
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for i in 0..grid.len() {
        let x = &grid.nodes[i];
        let n = &grid.normals[i];
        let phase = (-I * k * theta.dot(x)).exp() * grid.weights[i];
        let n_perp = tangential(n, &theta);
        let x_perp = tangential(x, &theta);
        let density = dnu[i] + I * k * n.dot(&theta) * u[i];
        for c in 0..3 {
            acc[c] += (I * k * n_perp[c] * u[i] - I * k * x_perp[c] * density) * phase;
        }
    }
    Ok(acc.map(|v| -v / (4.0 * PI)))
}

/// Euclidean norm of a complex 3-vector.
pub fn vector_norm(v: &[Complex64; 3]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `n` directions uniformly distributed on `S²`, reproducible from `seed`.
pub fn random_directions(n: usize, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: f64 = rng.gen_range(-1.0..=1.0);
            let phi: f64 = rng.gen_range(0.0..2.0 * PI);
            let s = (1.0 - z * z).max(0.0).sqrt();
            Vec3::new(s * phi.cos(), s * phi.sin(), z)
        })
        .collect()
}

fn tangent_basis(theta: &Vec3) -> (Vec3, Vec3) {
    let helper = if theta.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let t1 = tangential(&helper, theta).normalize();
    (t1, theta.cross(&t1))
}

/// Largest deviation between `∇_θ u_∞` and central differences of `u_∞`
/// along two tangent directions, over `directions`.
///
/// The difference quotient uses `(θ ± h t)/|θ ± h t|`, whose derivative in
/// `h` at zero is `t`.
pub fn gradient_fd_error(field: &dyn RadiatingField, directions: &[Vec3], h: f64) -> f64 {
    directions
        .par_iter()
        .map(|d| {
            let theta = d.normalize();
            let g = field.far_field_gradient(&theta);
            let (t1, t2) = tangent_basis(&theta);
            [t1, t2]
                .iter()
                .map(|t| {
                    let plus = field.far_field(&(theta + t * h).normalize());
                    let minus = field.far_field(&(theta - t * h).normalize());
                    let fd = (plus - minus) / (2.0 * h);
                    let analytic = g[0] * t.x + g[1] * t.y + g[2] * t.z;
                    (fd - analytic).norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}
