//! Boundary impedance coefficients.
//!
//! Two boundary operators appear in practice: `∂/∂n + γ` and
//! `∂/∂n + kγ` with dimensionless `γ`. Both are represented by the
//! coefficient `η` actually added to `∂/∂n`, together with the scale that
//! maps `γ` to `η`. Certificates use `η`; the plane-wave a-priori bounds
//! use the dimensionless `γ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BoundaryGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `η = γ`.
    Direct,
    /// `η = kγ`.
    Scaled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Impedance {
    gamma: Vec<Complex64>,
    scale: f64,
    convention: Convention,
    gamma0: f64,
    gamma_max: f64,
    gamma_hat: f64,
}

impl Impedance {
    fn build(gamma: Vec<Complex64>, scale: f64, convention: Convention) -> Result<Self> {
        if gamma.is_empty() {
            return Err(Error::Domain("impedance needs at least one sample".into()));
        }
        let gamma0 = gamma.iter().map(|g| g.im).fold(f64::INFINITY, f64::min);
        if !(gamma0 > 0.0) || gamma.iter().any(|g| !g.is_finite()) {
            return Err(Error::Impedance { min_imag: gamma0 });
        }
        let gamma_max = gamma.iter().map(|g| g.norm()).fold(0.0, f64::max);
        let gamma_hat = gamma.iter().map(|g| g.im).fold(0.0, f64::max);
        Ok(Impedance {
            gamma,
            scale,
            convention,
            gamma0,
            gamma_max,
            gamma_hat,
        })
    }

    /// Operator `∂/∂n + γ(r)`.
    pub fn direct(gamma: Vec<Complex64>) -> Result<Self> {
        Self::build(gamma, 1.0, Convention::Direct)
    }

    /// Operator `∂/∂n + kγ(r)`.
    pub fn scaled(k: f64, gamma: Vec<Complex64>) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::Domain(format!("wavenumber must be > 0, got {k}")));
        }
        Self::build(gamma, k, Convention::Scaled)
    }

    pub fn constant_scaled(k: f64, gamma: Complex64, grid: &BoundaryGrid) -> Result<Self> {
        Self::scaled(k, vec![gamma; grid.len()])
    }

    /// Sample `γ(θ, φ)` at the grid parameters, operator `∂/∂n + kγ`.
    pub fn from_fn_scaled<F>(k: f64, grid: &BoundaryGrid, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64,
    {
        Self::scaled(k, grid.params.iter().map(|&(t, p)| f(t, p)).collect())
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Coefficient added to `∂/∂n` at node `i`.
    pub fn eta(&self, i: usize) -> Complex64 {
        self.gamma[i] * self.scale
    }

    pub fn gamma(&self, i: usize) -> Complex64 {
        self.gamma[i]
    }

    pub fn eta_values(&self) -> Vec<Complex64> {
        self.gamma.iter().map(|g| g * self.scale).collect()
    }

    /// `γ₀ = min Im γ`.
    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    /// `Γ = max |γ|`.
    pub fn gamma_max(&self) -> f64 {
        self.gamma_max
    }

    /// `Γ̂ = max Im γ`.
    pub fn gamma_hat(&self) -> f64 {
        self.gamma_hat
    }

    /// `η₀ = min Im η`.
    pub fn eta0(&self) -> f64 {
        self.gamma0 * self.scale
    }

    /// `max |η|`.
    pub fn eta_max(&self) -> f64 {
        self.gamma_max * self.scale
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if n != self.len() {
            return Err(Error::LengthMismatch {
                expected: n,
                got: self.len(),
            });
        }
        Ok(())
    }
}
