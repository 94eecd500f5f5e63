//! Spherical Bessel and Hankel functions, Legendre polynomials, real
//! spherical harmonics and Gauss–Legendre rules.
//!
//! `j_l` is computed by Miller's downward recurrence normalized with the sum
//! rule `Σ (2l+1) j_l(x)² = 1`, which stays well conditioned at zeros of
//! `j_0`. `y_l` uses the upward recurrence, which is stable for the
//! second kind. Derivatives follow from `f'_l = f_{l-1} - (l+1)/x f_l`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Values of `j_l`, `y_l` and their derivatives at one argument, `l = 0..=l_max`.
#[derive(Debug, Clone)]
pub struct RadialFunctionTable {
    pub x: f64,
    pub j: Vec<f64>,
    pub y: Vec<f64>,
    pub dj: Vec<f64>,
    pub dy: Vec<f64>,
}

impl RadialFunctionTable {
    pub fn l_max(&self) -> usize {
        self.j.len() - 1
    }

    /// Spherical Hankel function of the first kind, `h_l = j_l + i y_l`.
    pub fn h(&self, l: usize) -> Complex64 {
        Complex64::new(self.j[l], self.y[l])
    }

    pub fn dh(&self, l: usize) -> Complex64 {
        Complex64::new(self.dj[l], self.dy[l])
    }

    /// `j_l y'_l - j'_l y_l`, which equals `1/x²` exactly.
    pub fn wronskian(&self, l: usize) -> f64 {
        self.j[l] * self.dy[l] - self.dj[l] * self.y[l]
    }
}

const RESCALE_THRESHOLD: f64 = 1e250;

/// Spherical Bessel functions of the first kind for `l = 0..=l_max`.
pub fn spherical_j(l_max: usize, x: f64) -> Result<Vec<f64>> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("spherical Bessel argument must be > 0, got {x}")));
    }
    let xc = x.ceil() as usize;
    let start = l_max.max(xc) + 20.max(xc) + 10;

    let mut vals = vec![0.0; start + 2];
    vals[start + 1] = 0.0;
    vals[start] = 1e-30;
    for n in (1..=start).rev() {
        let next = (2 * n + 1) as f64 / x * vals[n] - vals[n + 1];
        vals[n - 1] = next;
        if next.abs() > RESCALE_THRESHOLD {
            for v in vals[n - 1..].iter_mut() {
                *v /= RESCALE_THRESHOLD;
            }
        }
    }

    // values may sit near the rescale threshold; square them relative to the peak
    let peak = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let norm_sq: f64 = vals
        .iter()
        .enumerate()
        .map(|(n, v)| (2 * n + 1) as f64 * (v / peak).powi(2))
        .sum();
    let mut scale = 1.0 / (peak * norm_sq.sqrt());

    // The sum rule fixes the magnitude only; take the sign from whichever of
    // j_0, j_1 is further from a zero.
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    let reference = if j0.abs() >= j1.abs() {
        j0 * vals[0]
    } else {
        j1 * vals[1]
    };
    if reference < 0.0 {
        scale = -scale;
    }

    vals.truncate(l_max + 1);
    for v in vals.iter_mut() {
        *v *= scale;
    }
    Ok(vals)
}

/// Spherical Bessel functions of the second kind for `l = 0..=l_max`.
pub fn spherical_y(l_max: usize, x: f64) -> Result<Vec<f64>> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("spherical Bessel argument must be > 0, got {x}")));
    }
    let (s, c) = x.sin_cos();
    let mut y = Vec::with_capacity(l_max + 1);
    y.push(-c / x);
    if l_max >= 1 {
        y.push(-c / (x * x) - s / x);
    }
    for l in 1..l_max {
        let next = (2 * l + 1) as f64 / x * y[l] - y[l - 1];
        y.push(next);
    }
    Ok(y)
}

/// Tabulate `j_l, y_l, j'_l, y'_l` for `l = 0..=l_max` at `x > 0`.
pub fn radial_table(l_max: usize, x: f64) -> Result<RadialFunctionTable> {
    let j = spherical_j(l_max + 1, x)?;
    let y = spherical_y(l_max + 1, x)?;
    let derivative = |f: &[f64], l: usize| {
        if l == 0 {
            -f[1]
        } else {
            f[l - 1] - (l + 1) as f64 / x * f[l]
        }
    };
    let dj = (0..=l_max).map(|l| derivative(&j, l)).collect();
    let dy = (0..=l_max).map(|l| derivative(&y, l)).collect();
    Ok(RadialFunctionTable {
        x,
        j: j[..=l_max].to_vec(),
        y: y[..=l_max].to_vec(),
        dj,
        dy,
    })
}

fn check_unit_interval(t: f64) -> Result<()> {
    if !(t.abs() <= 1.0) {
        return Err(domain(format!("Legendre argument must lie in [-1, 1], got {t}")));
    }
    Ok(())
}

/// Legendre polynomials `P_0(t) .. P_{l_max}(t)`.
pub fn legendre_values(l_max: usize, t: f64) -> Result<Vec<f64>> {
    check_unit_interval(t)?;
    Ok(legendre_unchecked(l_max, t))
}

pub(crate) fn legendre_unchecked(l_max: usize, t: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(l_max + 1);
    p.push(1.0);
    if l_max >= 1 {
        p.push(t);
    }
    for l in 1..l_max {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * t * p[l] - lf * p[l - 1]) / (lf + 1.0);
        p.push(next);
    }
    p
}

/// Legendre polynomials and their first derivatives.
pub fn legendre_with_derivatives(l_max: usize, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_unit_interval(t)?;
    let p = legendre_unchecked(l_max, t);
    let one_minus = 1.0 - t * t;
    let dp = (0..=l_max)
        .map(|l| {
            if l == 0 {
                0.0
            } else if one_minus < 1e-14 {
                // endpoint values of P'_l
                let end = (l * (l + 1)) as f64 / 2.0;
                if t > 0.0 || l % 2 == 1 {
                    end
                } else {
                    -end
                }
            } else {
                l as f64 * (p[l - 1] - t * p[l]) / one_minus
            }
        })
        .collect();
    Ok((p, dp))
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for l in 1..n {
        let lf = l as f64;
        let p2 = ((2.0 * lf + 1.0) * x * p1 - lf * p0) / (lf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Real orthonormal spherical harmonics up to degree `l_max` and their
/// partial derivatives in `θ` and `φ`.
///
/// Index `l*l + l + m` holds degree `l`, order `m ∈ [-l, l]`; `m > 0` uses
/// `cos(mφ)`, `m < 0` uses `sin(|m|φ)`.
#[derive(Debug, Clone)]
pub struct RealHarmonics {
    pub l_max: usize,
    pub values: Vec<f64>,
    pub d_theta: Vec<f64>,
    pub d_phi: Vec<f64>,
}

impl RealHarmonics {
    pub fn index(l: usize, m: i64) -> usize {
        ((l * l + l) as i64 + m) as usize
    }

    pub fn count(l_max: usize) -> usize {
        (l_max + 1) * (l_max + 1)
    }
}

/// Evaluate the real spherical harmonics basis at `(θ, φ)`.
#[allow(clippy::needless_range_loop)]
pub fn real_harmonics(l_max: usize, theta: f64, phi: f64) -> RealHarmonics {
    let (st, ct) = theta.sin_cos();
    // Unnormalized associated Legendre functions without the Condon–Shortley
    // phase, P[l][m], and their θ-derivatives.
    let mut p = vec![vec![0.0; l_max + 2]; l_max + 2];
    for m in 0..=l_max + 1 {
        let mut pmm = 1.0;
        for k in 0..m {
            pmm *= (2 * k + 1) as f64 * st;
        }
        if m <= l_max + 1 {
            p[m][m] = pmm;
        }
        if m < l_max + 1 {
            p[m + 1][m] = ct * (2 * m + 1) as f64 * pmm;
        }
        for l in m + 2..=l_max + 1 {
            p[l][m] = ((2 * l - 1) as f64 * ct * p[l - 1][m] - (l + m - 1) as f64 * p[l - 2][m])
                / (l - m) as f64;
        }
    }
    let dp = |l: usize, m: usize| -> f64 {
        let upper = if m < l { p[l][m + 1] } else { 0.0 };
        if m == 0 {
            -upper
        } else {
            0.5 * ((l + m) as f64 * (l - m + 1) as f64 * p[l][m - 1] - upper)
        }
    };

    let n = RealHarmonics::count(l_max);
    let mut values = vec![0.0; n];
    let mut d_theta = vec![0.0; n];
    let mut d_phi = vec![0.0; n];
    for l in 0..=l_max {
        for m in 0..=l {
            let mut ratio = 1.0;
            for q in (l - m + 1)..=(l + m) {
                ratio /= q as f64;
            }
            let mut norm = ((2 * l + 1) as f64 / (4.0 * PI) * ratio).sqrt();
            if m > 0 {
                norm *= std::f64::consts::SQRT_2;
            }
            let base = l * l + l;
            let mf = m as f64;
            let (sm, cm) = (mf * phi).sin_cos();
            let plm = norm * p[l][m];
            let dplm = norm * dp(l, m);
            values[base + m] = plm * cm;
            d_theta[base + m] = dplm * cm;
            d_phi[base + m] = -mf * plm * sm;
            if m > 0 {
                values[base - m] = plm * sm;
                d_theta[base - m] = dplm * sm;
                d_phi[base - m] = mf * plm * cm;
            }
        }
    }
    RealHarmonics {
        l_max,
        values,
        d_theta,
        d_phi,
    }
}
