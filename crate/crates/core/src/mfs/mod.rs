//! Method of fundamental solutions for the exterior impedance problem.
//!
//! The approximate field is a superposition of outgoing point sources
//! placed inside the obstacle,
//!
//! ```text
//! u(r) = Σ_j c_j e^{ik|r - s_j|} / (4π |r - s_j|),
//! ```
//!
//! which satisfies the Helmholtz equation and the radiation condition
//! exactly. Only the boundary condition is met approximately; the defect
//! `α = (∂/∂n + η) u - f` is what the certificates in
//! [`crate::bounds::certify`] consume.

mod dtn;
pub mod lstsq;

pub use dtn::{
    default_dtn_source_count, dtn_matrix, DtnMatrix, DEFAULT_DTN_DEGREE, DEFAULT_DTN_RESOLUTION,
    DEFAULT_DTN_SHRINK, DIRICHLET_RESIDUAL_THRESHOLD,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{kernel, kernel_far_field, kernel_with_gradient, RadiatingField};
use crate::geometry::{BoundaryGrid, Surface, Vec3};
use crate::impedance::Impedance;
use lstsq::{solve_truncated, CMatrix, DEFAULT_RELATIVE_TOLERANCE};

const I: Complex64 = Complex64::new(0.0, 1.0);

pub const DEFAULT_SHRINK: f64 = 0.7;

/// Default source count for a grid: `⌈nodes / 2⌉`.
pub fn default_source_count(grid: &BoundaryGrid) -> usize {
    grid.len().div_ceil(2)
}

/// Source points strictly inside the obstacle.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSet {
    pub points: Vec<Vec3>,
}

impl SourceSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest distance from any source to any grid node.
    pub fn clearance(&self, grid: &BoundaryGrid) -> f64 {
        self.points
            .iter()
            .flat_map(|s| grid.nodes.iter().map(move |x| (x - s).norm()))
            .fold(f64::INFINITY, f64::min)
    }
}

fn grid_diameter(grid: &BoundaryGrid) -> f64 {
    grid.nodes
        .iter()
        .map(|x| (x - grid.centroid).norm())
        .fold(0.0, f64::max)
        * 2.0
}

/// Shrink the grid toward its centroid and pick `count` quasi-uniform points.
///
/// Selection is greedy farthest-point sampling seeded at the node with the
/// largest `z`, so `count = 1` yields the scaled north pole.
pub fn place_sources(
    surface: &Surface,
    grid: &BoundaryGrid,
    shrink: f64,
    count: usize,
) -> Result<SourceSet> {
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(Error::Sources(format!("shrink must lie in (0, 1), got {shrink}")));
    }
    if count == 0 {
        return Err(Error::Sources("at least one source required".into()));
    }
    if count > grid.len() {
        return Err(Error::Sources(format!(
            "{count} sources requested but the grid has only {} nodes",
            grid.len()
        )));
    }
    let c = grid.centroid;
    let candidates: Vec<Vec3> = grid.nodes.iter().map(|x| c + (x - c) * shrink).collect();

    let mut start = 0;
    for (i, p) in candidates.iter().enumerate() {
        if p.z > candidates[start].z {
            start = i;
        }
    }
    let mut chosen = vec![start];
    let mut dist: Vec<f64> = candidates
        .iter()
        .map(|p| (p - candidates[start]).norm())
        .collect();
    while chosen.len() < count {
        let (next, d) = dist
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        if d <= 0.0 {
            return Err(Error::Sources("no distinct candidate left".into()));
        }
        chosen.push(next);
        for (i, p) in candidates.iter().enumerate() {
            dist[i] = dist[i].min((p - candidates[next]).norm());
        }
    }
    let points: Vec<Vec3> = chosen.iter().map(|&i| candidates[i]).collect();

    for (j, p) in points.iter().enumerate() {
        if !surface.contains(p) {
            return Err(Error::Sources(format!(
                "source {j} at ({:.4}, {:.4}, {:.4}) falls outside the surface",
                p.x, p.y, p.z
            )));
        }
    }
    let set = SourceSet { points };
    let d_min = 1e-3 * grid_diameter(grid);
    let clearance = set.clearance(grid);
    if clearance < d_min {
        return Err(Error::Sources(format!(
            "sources lie within {clearance:e} of the boundary (minimum {d_min:e})"
        )));
    }
    Ok(set)
}

/// Represented field `Σ c_j Φ(·, s_j)`.
#[derive(Debug, Clone)]
pub struct MfsSolution {
    pub k: f64,
    pub sources: SourceSet,
    pub coefficients: Vec<Complex64>,
    pub effective_rank: usize,
    /// Ratio of largest to smallest retained singular value.
    pub condition_estimate: f64,
}

/// Serializable form of an [`MfsSolution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfsExport {
    pub k: f64,
    pub sources: Vec<[f64; 3]>,
    pub coefficients: Vec<[f64; 2]>,
    pub effective_rank: usize,
}

impl MfsSolution {
    pub fn from_coefficients(k: f64, sources: SourceSet, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != sources.len() {
            return Err(Error::LengthMismatch {
                expected: sources.len(),
                got: coefficients.len(),
            });
        }
        let rank = sources.len();
        Ok(MfsSolution {
            k,
            sources,
            coefficients,
            effective_rank: rank,
            condition_estimate: f64::NAN,
        })
    }

    pub fn export(&self) -> MfsExport {
        MfsExport {
            k: self.k,
            sources: self.sources.points.iter().map(|p| [p.x, p.y, p.z]).collect(),
            coefficients: self.coefficients.iter().map(|c| [c.re, c.im]).collect(),
            effective_rank: self.effective_rank,
        }
    }

    pub fn import(e: &MfsExport) -> Result<Self> {
        let sources = SourceSet {
            points: e.sources.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect(),
        };
        let coefficients = e.coefficients.iter().map(|c| Complex64::new(c[0], c[1])).collect();
        let mut sol = Self::from_coefficients(e.k, sources, coefficients)?;
        sol.effective_rank = e.effective_rank;
        Ok(sol)
    }

    fn check_point(&self, r: &Vec3) -> Result<()> {
        for (index, s) in self.sources.points.iter().enumerate() {
            if (r - s).norm() <= 1e-12 * (1.0 + s.norm()) {
                return Err(Error::Singular { index });
            }
        }
        Ok(())
    }

    /// Field values at arbitrary points away from the sources.
    pub fn evaluate(&self, points: &[Vec3]) -> Result<Vec<Complex64>> {
        for p in points {
            self.check_point(p)?;
        }
        Ok(points
            .par_iter()
            .map(|r| {
                self.sources
                    .points
                    .iter()
                    .zip(&self.coefficients)
                    .map(|(s, c)| c * kernel(self.k, r, s))
                    .sum()
            })
            .collect())
    }

    /// Traces `(u, ∂u/∂n)` on the grid.
    pub fn traces(&self, grid: &BoundaryGrid) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        for p in &grid.nodes {
            self.check_point(p)?;
        }
        let pairs: Vec<(Complex64, Complex64)> = grid
            .nodes
            .par_iter()
            .zip(grid.normals.par_iter())
            .map(|(x, n)| {
                let mut u = Complex64::new(0.0, 0.0);
                let mut dn = Complex64::new(0.0, 0.0);
                for (s, c) in self.sources.points.iter().zip(&self.coefficients) {
                    let (phi, g) = kernel_with_gradient(self.k, x, s);
                    u += c * phi;
                    dn += c * (g[0] * n.x + g[1] * n.y + g[2] * n.z);
                }
                (u, dn)
            })
            .collect();
        Ok(pairs.into_iter().unzip())
    }

    pub fn evaluate_normal_derivative(&self, grid: &BoundaryGrid) -> Result<Vec<Complex64>> {
        Ok(self.traces(grid)?.1)
    }

    /// `u_∞(θ) = Σ_j c_j e^{-ik θ·s_j} / (4π)`.
    pub fn far_field(&self, theta: &Vec3) -> Complex64 {
        self.sources
            .points
            .iter()
            .zip(&self.coefficients)
            .map(|(s, c)| c * kernel_far_field(self.k, theta, s))
            .sum()
    }

    /// Tangential gradient of the far field.
    pub fn far_field_gradient(&self, theta: &Vec3) -> [Complex64; 3] {
        let mut acc = [Complex64::new(0.0, 0.0); 3];
        for (s, c) in self.sources.points.iter().zip(&self.coefficients) {
            let s_perp = s - theta * s.dot(theta);
            let f = -I * self.k * c * kernel_far_field(self.k, theta, s);
            for (a, comp) in acc.iter_mut().zip(s_perp.iter()) {
                *a += f * *comp;
            }
        }
        acc
    }
}

impl RadiatingField for MfsSolution {
    fn wavenumber(&self) -> f64 {
        self.k
    }

    fn traces(&self, grid: &BoundaryGrid) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        MfsSolution::traces(self, grid)
    }

    fn far_field(&self, theta: &Vec3) -> Complex64 {
        MfsSolution::far_field(self, theta)
    }

    fn far_field_gradient(&self, theta: &Vec3) -> [Complex64; 3] {
        MfsSolution::far_field_gradient(self, theta)
    }
}

/// Weighted collocation matrix `√w_i (∂_n + η_i) Φ(x_i, s_j)`.
fn impedance_matrix(grid: &BoundaryGrid, sources: &SourceSet, k: f64, eta: &Impedance) -> CMatrix {
    let m = sources.len();
    let rows: Vec<Vec<Complex64>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = &grid.nodes[i];
            let n = &grid.normals[i];
            let sw = grid.weights[i].sqrt();
            sources
                .points
                .iter()
                .map(|s| {
                    let (phi, g) = kernel_with_gradient(k, x, s);
                    (g[0] * n.x + g[1] * n.y + g[2] * n.z + eta.eta(i) * phi) * sw
                })
                .collect()
        })
        .collect();
    DMatrix::from_fn(grid.len(), m, |i, j| rows[i][j])
}

/// Weighted least-squares fit of `(∂/∂n + η) u = f` on the grid.
pub fn solve_impedance(
    grid: &BoundaryGrid,
    sources: &SourceSet,
    k: f64,
    eta: &Impedance,
    rhs: &[Complex64],
) -> Result<MfsSolution> {
    solve_impedance_with_tolerance(grid, sources, k, eta, rhs, DEFAULT_RELATIVE_TOLERANCE)
}

pub fn solve_impedance_with_tolerance(
    grid: &BoundaryGrid,
    sources: &SourceSet,
    k: f64,
    eta: &Impedance,
    rhs: &[Complex64],
    rel_tol: f64,
) -> Result<MfsSolution> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("k > 0 required, got {k}")));
    }
    eta.check_len(grid.len())?;
    if eta.eta0() <= 0.0 {
        return Err(Error::Impedance {
            min_imag: eta.eta0(),
        });
    }
    if rhs.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: rhs.len(),
        });
    }
    for p in &grid.nodes {
        for (index, s) in sources.points.iter().enumerate() {
            if (p - s).norm() == 0.0 {
                return Err(Error::Singular { index });
            }
        }
    }
    let a = impedance_matrix(grid, sources, k, eta);
    let b = CMatrix::from_fn(grid.len(), 1, |i, _| rhs[i] * grid.weights[i].sqrt());
    let sol = solve_truncated(a, &b, rel_tol);
    if sol.rank == 0 && b.norm() > 0.0 {
        return Err(Error::RankCollapse {
            rank: 0,
            cols: sources.len(),
        });
    }
    Ok(MfsSolution {
        k,
        sources: sources.clone(),
        coefficients: sol.x.column(0).iter().cloned().collect(),
        effective_rank: sol.rank,
        condition_estimate: sol.singular_max / sol.singular_min_kept,
    })
}

/// Boundary defect `α = (∂/∂n + η) u - f` of an approximate solution.
#[derive(Debug, Clone)]
pub struct Residual {
    pub samples: Vec<Complex64>,
    /// `‖α‖_{L²(∂Ω)}`.
    pub norm: f64,
    /// `η₀ = inf Im η`.
    pub eta0: f64,
    /// `sup |η|`.
    pub eta_max: f64,
}

pub fn boundary_residual(
    sol: &MfsSolution,
    grid: &BoundaryGrid,
    eta: &Impedance,
    rhs: &[Complex64],
) -> Result<Residual> {
    eta.check_len(grid.len())?;
    if rhs.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: rhs.len(),
        });
    }
    let (u, dnu) = sol.traces(grid)?;
    let samples: Vec<Complex64> = (0..grid.len())
        .map(|i| dnu[i] + eta.eta(i) * u[i] - rhs[i])
        .collect();
    let norm = grid.l2_norm(&samples)?;
    Ok(Residual {
        samples,
        norm,
        eta0: eta.eta0(),
        eta_max: eta.eta_max(),
    })
}
