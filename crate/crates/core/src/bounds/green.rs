//! Energy identity `Im ∫_{∂Ω} (∂u/∂n) ū dS = k ‖u_∞‖²` for radiating fields.

use num_complex::Complex64;
use serde::Serialize;

use super::far_field::{total_cross_section, FarFieldGrid};
use crate::error::Result;
use crate::geometry::BoundaryGrid;

/// Normalization floor for the relative defect of vanishing fields.
pub const DEFECT_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GreenDefect {
    /// `Im Σ w_i (∂u/∂n)_i conj(u_i)`.
    pub flux: f64,
    /// `k σ`.
    pub k_sigma: f64,
    /// `|flux - kσ| / max(kσ, floor)`.
    pub defect: f64,
}

pub fn greens_identity_check(
    grid: &BoundaryGrid,
    u: &[Complex64],
    dnu: &[Complex64],
    ff: &FarFieldGrid,
) -> Result<GreenDefect> {
    let flux = grid.inner(dnu, u)?.im;
    let k_sigma = ff.k * total_cross_section(ff);
    Ok(GreenDefect {
        flux,
        k_sigma,
        defect: (flux - k_sigma).abs() / k_sigma.max(DEFECT_FLOOR),
    })
}
