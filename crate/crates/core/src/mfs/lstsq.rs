//! Truncated least squares for complex, possibly ill-conditioned systems.
//!
//! `A = QR` by Householder reflections, then `R = U Σ Vᴴ`; singular values
//! below `rel_tol · σ_max` are discarded. The returned solution is the
//! minimum-norm minimizer of `‖A x - b‖` within the retained spectrum.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Relative singular-value cutoff.
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LstsqSolution {
    pub x: CMatrix,
    pub rank: usize,
    pub singular_max: f64,
    pub singular_min_kept: f64,
}

pub fn solve_truncated(a: CMatrix, b: &CMatrix, rel_tol: f64) -> LstsqSolution {
    let (m, n) = a.shape();
    let (q_b, r) = if m > n {
        let qr = a.qr();
        let q = qr.q();
        (q.adjoint() * b, qr.r())
    } else {
        (b.clone(), a)
    };
    let svd = r.svd(true, true);
    let u = svd.u.as_ref().expect("U requested");
    let v_t = svd.v_t.as_ref().expect("V^H requested");
    let s = &svd.singular_values;
    let singular_max = s.iter().cloned().fold(0.0, f64::max);
    let cutoff = rel_tol * singular_max;

    let proj = u.adjoint() * q_b;
    let cols = proj.ncols();
    let mut scaled = CMatrix::zeros(s.len(), cols);
    let mut rank = 0;
    let mut singular_min_kept = f64::INFINITY;
    for (i, &sv) in s.iter().enumerate() {
        if sv > cutoff && sv > 0.0 {
            rank += 1;
            singular_min_kept = singular_min_kept.min(sv);
            for c in 0..cols {
                scaled[(i, c)] = proj[(i, c)] / sv;
            }
        }
    }
    let x = v_t.adjoint() * scaled;
    LstsqSolution {
        x,
        rank,
        singular_max,
        singular_min_kept,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn overdetermined_consistent_system() {
        let a = CMatrix::from_row_slice(
            4,
            2,
            &[c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0), c(1.0, 1.0), c(0.0, 0.5), c(3.0, 0.0), c(1.0, 1.0), c(-1.0, 0.0)],
        );
        let x_true = CMatrix::from_column_slice(2, 1, &[c(0.5, -2.0), c(1.0, 0.25)]);
        let b = &a * &x_true;
        let sol = solve_truncated(a, &b, 1e-12);
        assert_eq!(sol.rank, 2);
        assert!((sol.x - x_true).norm() < 1e-13);
    }

    #[test]
    fn rank_deficient_gives_minimum_norm() {
        // two identical columns: minimum-norm solution splits the weight
        let a = CMatrix::from_row_slice(3, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(2.0, 0.0), c(2.0, 0.0)]);
        let b = CMatrix::from_column_slice(3, 1, &[c(2.0, 0.0), c(0.0, 2.0), c(4.0, 0.0)]);
        let sol = solve_truncated(a, &b, 1e-12);
        assert_eq!(sol.rank, 1);
        assert!((sol.x[(0, 0)] - c(1.0, 0.0)).norm() < 1e-13);
        assert!((sol.x[(1, 0)] - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let a = CMatrix::from_fn(6, 3, |i, j| c((i + j) as f64, (i * j) as f64 + 1.0));
        let b = CMatrix::zeros(6, 1);
        let sol = solve_truncated(a, &b, 1e-12);
        assert!(sol.x.iter().all(|v| *v == c(0.0, 0.0)));
    }
}
