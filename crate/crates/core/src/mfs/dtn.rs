//! Discrete Dirichlet-to-Neumann matrix on a general surface.
//!
//! Boundary basis: traces of the outgoing multipoles `h_l(k|x-c|) Y_lm(x̂)`
//! of degree `≤ L` about the grid centroid `c`, orthonormalized in the
//! weighted `L²(∂Ω)` inner product. Each basis function is used as
//! Dirichlet data for an MFS fit; the normal derivative of the fitted field
//! is projected back onto the basis. On a centred sphere the basis spans
//! the same spaces as `Y_lm`, so the matrix reproduces `μ_l` with
//! multiplicity `2l + 1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::lstsq::{solve_truncated, CMatrix, DEFAULT_RELATIVE_TOLERANCE};
use super::SourceSet;
use crate::error::{Error, Result};
use crate::field::kernel_with_gradient;
use crate::geometry::BoundaryGrid;
use crate::special::{radial_table, real_harmonics, RealHarmonics};

pub const DEFAULT_DTN_DEGREE: usize = 8;
pub const DEFAULT_DTN_RESOLUTION: (usize, usize) = (32, 64);
/// Sources sit deeper than for scattering solves; the fits must reach the
/// Dirichlet threshold for every basis function at once.
pub const DEFAULT_DTN_SHRINK: f64 = 0.3;

/// Largest source count the node-count requirement allows.
pub fn default_dtn_source_count(nodes: usize) -> usize {
    nodes / 4
}

/// Relative Dirichlet defect above which the matrix is flagged unreliable.
pub const DIRICHLET_RESIDUAL_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct DtnMatrix {
    pub k: f64,
    pub degree: usize,
    #[serde(skip)]
    pub matrix: CMatrix,
    /// Eigenvalues sorted by decreasing real part.
    pub eigenvalues: Vec<Complex64>,
    /// Largest weighted `L²` defect of the Dirichlet fits (unit-norm data).
    pub max_dirichlet_residual: f64,
    pub reliable: bool,
}

impl DtnMatrix {
    pub fn min_imag(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.im).fold(f64::INFINITY, f64::min)
    }
}

const SCHUR_TOLERANCE: f64 = 1e-13;

fn multipole_row(k: f64, d: &crate::geometry::Vec3, degree: usize) -> Result<Vec<Complex64>> {
    let r = d.norm();
    if !(r > 0.0) {
        return Err(Error::Domain("boundary node coincides with the centroid".into()));
    }
    let theta = (d.z / r).clamp(-1.0, 1.0).acos();
    let phi = d.y.atan2(d.x);
    let radial = radial_table(degree, k * r)?;
    let y = real_harmonics(degree, theta, phi);
    let mut row = Vec::with_capacity(y.values.len());
    for l in 0..=degree {
        let h = radial.h(l);
        for m in -(l as i64)..=(l as i64) {
            row.push(h * y.values[RealHarmonics::index(l, m)]);
        }
    }
    Ok(row)
}

pub fn dtn_matrix(grid: &BoundaryGrid, sources: &SourceSet, k: f64, degree: usize) -> Result<DtnMatrix> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("k > 0 required, got {k}")));
    }
    let n_basis = RealHarmonics::count(degree);
    if grid.len() < 4 * sources.len() {
        return Err(Error::Domain(format!(
            "grid has {} nodes; at least 4 x {} sources required",
            grid.len(),
            sources.len()
        )));
    }
    if grid.len() < n_basis {
        return Err(Error::Domain(format!(
            "grid has {} nodes, fewer than {n_basis} basis functions",
            grid.len()
        )));
    }
    let n = grid.len();
    let m = sources.len();
    let sqrt_w: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();

    let multipoles: Vec<Vec<Complex64>> = grid
        .nodes
        .par_iter()
        .map(|x| multipole_row(k, &(x - grid.centroid), degree))
        .collect::<Result<_>>()?;
    let weighted_basis = CMatrix::from_fn(n, n_basis, |i, b| multipoles[i][b] * sqrt_w[i]);
    // columns of q are √w · (orthonormal basis functions)
    let q = weighted_basis.qr().q();

    let kernels: Vec<Vec<(Complex64, Complex64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = &grid.nodes[i];
            let nrm = &grid.normals[i];
            sources
                .points
                .iter()
                .map(|s| {
                    let (phi, g) = kernel_with_gradient(k, x, s);
                    (phi, g[0] * nrm.x + g[1] * nrm.y + g[2] * nrm.z)
                })
                .collect()
        })
        .collect();
    let dirichlet = DMatrix::from_fn(n, m, |i, j| kernels[i][j].0 * sqrt_w[i]);
    let neumann = DMatrix::from_fn(n, m, |i, j| kernels[i][j].1 * sqrt_w[i]);

    let fit = solve_truncated(dirichlet.clone(), &q, DEFAULT_RELATIVE_TOLERANCE);
    let defect = &dirichlet * &fit.x - &q;
    let max_dirichlet_residual = defect
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);

    let matrix = q.adjoint() * (&neumann * &fit.x);
    // near-degenerate clusters stall the QR iteration at machine epsilon
    let eig = matrix
        .clone()
        .try_schur(SCHUR_TOLERANCE, 0)
        .and_then(|s| s.eigenvalues())
        .ok_or_else(|| Error::Domain("Schur decomposition did not converge".into()))?;
    let mut eigenvalues: Vec<Complex64> = eig.iter().cloned().collect();
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));

    Ok(DtnMatrix {
        k,
        degree,
        matrix,
        eigenvalues,
        max_dirichlet_residual,
        reliable: max_dirichlet_residual <= DIRICHLET_RESIDUAL_THRESHOLD,
    })
}
