//! Incident plane waves and the free-space outgoing kernel.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::Result;
use crate::geometry::{BoundaryGrid, Vec3};
use crate::impedance::Impedance;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `e^{ik r·θ₀}` with unit direction `θ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub k: f64,
    pub direction: Vec3,
}

impl PlaneWave {
    pub fn new(k: f64, direction: Vec3) -> Self {
        PlaneWave {
            k,
            direction: direction.normalize(),
        }
    }

    pub fn value(&self, x: &Vec3) -> Complex64 {
        (I * self.k * x.dot(&self.direction)).exp()
    }

    pub fn normal_derivative(&self, x: &Vec3, n: &Vec3) -> Complex64 {
        I * self.k * n.dot(&self.direction) * self.value(x)
    }

    /// Boundary data `-(∂/∂n + η) e^{ik r·θ₀}` of the scattered field.
    pub fn impedance_rhs(&self, grid: &BoundaryGrid, eta: &Impedance) -> Vec<Complex64> {
        grid.nodes
            .iter()
            .zip(&grid.normals)
            .enumerate()
            .map(|(i, (x, n))| -(self.normal_derivative(x, n) + eta.eta(i) * self.value(x)))
            .collect()
    }
}

/// A scattered field that radiates: it can be traced on a boundary grid and
/// has a far-field pattern with a tangential gradient.
pub trait RadiatingField: Sync {
    fn wavenumber(&self) -> f64;
    fn traces(&self, grid: &BoundaryGrid) -> Result<(Vec<Complex64>, Vec<Complex64>)>;
    fn far_field(&self, theta: &Vec3) -> Complex64;
    fn far_field_gradient(&self, theta: &Vec3) -> [Complex64; 3];
}

/// Outgoing fundamental solution `e^{ik|r-s|} / (4π|r-s|)`.
pub fn kernel(k: f64, r: &Vec3, s: &Vec3) -> Complex64 {
    let d = (r - s).norm();
    (I * k * d).exp() / (4.0 * PI * d)
}

/// Kernel value and its gradient with respect to `r`.
pub fn kernel_with_gradient(k: f64, r: &Vec3, s: &Vec3) -> (Complex64, [Complex64; 3]) {
    let diff = r - s;
    let d = diff.norm();
    let phi = (I * k * d).exp() / (4.0 * PI * d);
    let radial = phi * (I * k - 1.0 / d) / d;
    (phi, [radial * diff.x, radial * diff.y, radial * diff.z])
}

/// Far-field amplitude of the kernel centred at `s` in direction `θ`.
pub fn kernel_far_field(k: f64, theta: &Vec3, s: &Vec3) -> Complex64 {
    (-I * k * theta.dot(s)).exp() / (4.0 * PI)
}
