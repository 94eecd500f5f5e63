//! A-priori bounds for plane-wave scattering with `(∂/∂n + kγ) u = -(∂/∂n + kγ) e^{ik r·θ₀}`.
//!
//! Two families are reported side by side. The "stated" family is the set
//! of final inequalities; the "derived" family collects the intermediate
//! constants that appear along the way of deriving them. They do not agree
//! in general (e.g. the derived cross-section constant `2S(1+Γ)²/γ₀` is
//! smaller than the stated `S(1+Γ)²(γ₀+Γ)/γ₀²` whenever `Γ > γ₀`), so
//! neither is preferred.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AprioriInputs {
    pub k: f64,
    /// `γ₀ = inf Im γ`.
    pub gamma0: f64,
    /// `Γ = sup |γ|`.
    pub gamma_max: f64,
    /// Surface area `S`.
    pub area: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatedBounds {
    /// `‖u‖ ≤ √S (1+Γ)/γ₀`
    pub f1: f64,
    /// `‖∂u/∂n‖ ≤ k√S (1+Γ)(γ₀+Γ)/γ₀`
    pub f2: f64,
    /// `σ ≤ S (1+Γ)²(γ₀+Γ)/γ₀²`
    pub f3: f64,
    /// `|∇_θ u_∞| ≤ (√S k/4π) ((1+Γ)/γ₀) (k(γ₀+Γ) + k + 1)`
    pub f4: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedBounds {
    /// `γ₀‖u‖ ≤ √S(1+Γ)`
    pub ff2: f64,
    /// `‖∂u/∂n‖ ≤ 2k√S(1+Γ)`
    pub lastlast: f64,
    /// `σ ≤ 2S(1+Γ)²/γ₀`
    pub alm1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AprioriBounds {
    pub inputs: AprioriInputs,
    pub stated: StatedBounds,
    pub derived: DerivedBounds,
    /// Uniform amplitude cap `M = kS(1+Γ)(γ₀+Γ+1)/(4πγ₀)`.
    pub amplitude_cap: f64,
}

pub fn apriori_bounds(k: f64, gamma0: f64, gamma_max: f64, area: f64) -> Result<AprioriBounds> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(domain(format!("k > 0 required, got {k}")));
    }
    if !(gamma0 > 0.0) || !gamma0.is_finite() {
        return Err(domain(format!("gamma0 > 0 required, got {gamma0}")));
    }
    if !(gamma_max >= gamma0) || !gamma_max.is_finite() {
        return Err(domain(format!(
            "Gamma >= gamma0 required, got Gamma = {gamma_max}, gamma0 = {gamma0}"
        )));
    }
    if !(area > 0.0) || !area.is_finite() {
        return Err(domain(format!("area > 0 required, got {area}")));
    }
    let g0 = gamma0;
    let gm = gamma_max;
    let root_s = area.sqrt();
    let stated = StatedBounds {
        f1: root_s * (1.0 + gm) / g0,
        f2: k * root_s * (1.0 + gm) * (g0 + gm) / g0,
        f3: area * (1.0 + gm).powi(2) * (g0 + gm) / (g0 * g0),
        f4: root_s * k / (4.0 * PI) * ((1.0 + gm) / g0) * (k * (g0 + gm) + k + 1.0),
    };
    let derived = DerivedBounds {
        ff2: root_s * (1.0 + gm) / g0,
        lastlast: 2.0 * k * root_s * (1.0 + gm),
        alm1: 2.0 * area * (1.0 + gm).powi(2) / g0,
    };
    Ok(AprioriBounds {
        inputs: AprioriInputs {
            k,
            gamma0,
            gamma_max,
            area,
        },
        stated,
        derived,
        amplitude_cap: k * area * (1.0 + gm) * (g0 + gm + 1.0) / (4.0 * PI * g0),
    })
}

impl AprioriBounds {
    /// Lower bound on the transport cross section given the total one:
    /// `(1/2π) (σγ₀/(kS))² / ((1+Γ)²(1+Γ+γ₀)²)`.
    pub fn transport_lower_bound(&self, sigma: f64) -> f64 {
        let AprioriInputs {
            k,
            gamma0,
            gamma_max,
            area,
        } = self.inputs;
        let ratio = sigma * gamma0 / (k * area);
        ratio * ratio
            / (2.0 * PI * (1.0 + gamma_max).powi(2) * (1.0 + gamma_max + gamma0).powi(2))
    }

    /// `σ² / (8π M²)`, the form reached inside the proof before the final
    /// simplification. It equals `4π²` times [`Self::transport_lower_bound`].
    pub fn transport_lower_bound_via_cap(&self, sigma: f64) -> f64 {
        sigma * sigma / (8.0 * PI * self.amplitude_cap * self.amplitude_cap)
    }
}
