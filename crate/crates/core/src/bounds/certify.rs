//! A-posteriori certificates driven only by the computable residual.
//!
//! If `u` solves `(∂/∂n + η) u = f` and `u¹` radiates with boundary defect
//! `α`, then with `η₀ = inf Im η` and `Γ = sup |η|`:
//!
//! ```text
//! ‖u - u¹‖             ≤ ‖α‖ / η₀
//! ‖∂ₙu - ∂ₙu¹‖         ≤ (Γ/η₀ + 1) ‖α‖
//! ‖u_∞ - u¹_∞‖²_{S²}   ≤ (1/(k η₀)) (Γ/η₀ + 1) ‖α‖²
//! ```
//!
//! The first line follows from `‖(∂ₙ + η)v‖ ‖v‖ ≥ Im⟨(∂ₙ + η)v, v⟩ ≥ η₀‖v‖²`
//! for radiating `v`, which holds for any variable `η`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mfs::Residual;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleComparison {
    pub error_field: f64,
    pub error_normal_derivative: f64,
    pub error_far_field_sq: f64,
    pub effectivity_field: f64,
    pub effectivity_normal_derivative: f64,
    pub effectivity_far_field: f64,
}

impl OracleComparison {
    pub fn all_at_least_one(&self) -> bool {
        self.effectivity_field >= 1.0
            && self.effectivity_normal_derivative >= 1.0
            && self.effectivity_far_field >= 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifiedReport {
    pub k: f64,
    pub residual_norm: f64,
    pub eta0: f64,
    pub eta_max: f64,
    pub bound_field: f64,
    pub bound_normal_derivative: f64,
    pub bound_far_field_sq: f64,
    pub oracle: Option<OracleComparison>,
}

/// Certificates from `‖α‖`, `η₀`, `sup|η|` and `k`.
pub fn certify_parts(residual_norm: f64, eta0: f64, eta_max: f64, k: f64) -> Result<CertifiedReport> {
    if !(eta0 > 0.0) {
        return Err(Error::Impedance { min_imag: eta0 });
    }
    if !(k > 0.0) {
        return Err(Error::Domain(format!("k > 0 required, got {k}")));
    }
    if !(residual_norm >= 0.0) {
        return Err(Error::Domain(format!(
            "residual norm must be non-negative, got {residual_norm}"
        )));
    }
    let factor = eta_max / eta0 + 1.0;
    Ok(CertifiedReport {
        k,
        residual_norm,
        eta0,
        eta_max,
        bound_field: residual_norm / eta0,
        bound_normal_derivative: factor * residual_norm,
        bound_far_field_sq: factor * residual_norm * residual_norm / (k * eta0),
        oracle: None,
    })
}

pub fn certify(residual: &Residual, k: f64) -> Result<CertifiedReport> {
    certify_parts(residual.norm, residual.eta0, residual.eta_max, k)
}

fn effectivity(bound: f64, error: f64) -> f64 {
    if error == 0.0 {
        if bound == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        bound / error
    }
}

impl CertifiedReport {
    /// Attach true errors measured against an exact solution.
    pub fn with_oracle(mut self, error_field: f64, error_normal_derivative: f64, error_far_field_sq: f64) -> Self {
        self.oracle = Some(OracleComparison {
            error_field,
            error_normal_derivative,
            error_far_field_sq,
            effectivity_field: effectivity(self.bound_field, error_field),
            effectivity_normal_derivative: effectivity(
                self.bound_normal_derivative,
                error_normal_derivative,
            ),
            effectivity_far_field: effectivity(self.bound_far_field_sq, error_far_field_sq),
        });
        self
    }
}
