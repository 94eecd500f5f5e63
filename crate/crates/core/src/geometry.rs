//! Parametric closed surfaces, tensor-product surface quadrature and
//! boundary-trace norms.
//!
//! Every surface is parametrized over `(θ, φ) ∈ [0, π] × [0, 2π)` and is
//! star-shaped about the origin. Quadrature uses Gauss–Legendre nodes in
//! `cos θ` tensored with the trapezoid rule in `φ`; weights carry the area
//! Jacobian so `Σ w_i f(x_i) ≈ ∫_{∂Ω} f dS`.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::special::{gauss_legendre, real_harmonics, RealHarmonics};

pub type Vec3 = Vector3<f64>;

/// One coefficient of the radial perturbation `Σ c_lm Y_lm(θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicCoefficient {
    pub l: usize,
    pub m: i64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceSpec {
    Sphere {
        radius: f64,
    },
    Ellipsoid {
        a: f64,
        b: f64,
        c: f64,
    },
    /// `r(θ, φ) = base_radius + Σ c_lm Y_lm(θ, φ)` with real orthonormal `Y_lm`.
    StarShaped {
        base_radius: f64,
        #[serde(default)]
        coefficients: Vec<HarmonicCoefficient>,
    },
}

impl SurfaceSpec {
    pub fn unit_sphere() -> Self {
        SurfaceSpec::Sphere { radius: 1.0 }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Surface {
            param: name.into(),
            reason: format!("must be positive and finite, got {v}"),
        })
    }
}

/// Validated parametric surface.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    spec: SurfaceSpec,
    harmonic_degree: usize,
}

/// Point and first derivatives of the parametrization at `(θ, φ)`.
#[derive(Debug, Clone, Copy)]
pub struct SurfacePoint {
    pub position: Vec3,
    pub d_theta: Vec3,
    pub d_phi: Vec3,
}

impl SurfacePoint {
    /// `|r_θ × r_φ|`, the area element per unit `dθ dφ`.
    pub fn jacobian(&self) -> f64 {
        self.d_theta.cross(&self.d_phi).norm()
    }
}

fn direction(theta: f64, phi: f64) -> (Vec3, Vec3, Vec3) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let radial = Vec3::new(st * cp, st * sp, ct);
    let e_theta = Vec3::new(ct * cp, ct * sp, -st);
    // ∂ radial / ∂φ = sinθ · e_φ
    let d_phi = Vec3::new(-st * sp, st * cp, 0.0);
    (radial, e_theta, d_phi)
}

/// Validate `spec` and return the parametric surface.
pub fn build_surface(spec: SurfaceSpec) -> Result<Surface> {
    let mut harmonic_degree = 0;
    match &spec {
        SurfaceSpec::Sphere { radius } => positive("radius", *radius)?,
        SurfaceSpec::Ellipsoid { a, b, c } => {
            positive("a", *a)?;
            positive("b", *b)?;
            positive("c", *c)?;
        }
        SurfaceSpec::StarShaped {
            base_radius,
            coefficients,
        } => {
            positive("base_radius", *base_radius)?;
            for (i, cf) in coefficients.iter().enumerate() {
                if cf.m.unsigned_abs() as usize > cf.l {
                    return Err(Error::Surface {
                        param: format!("coefficients[{i}]"),
                        reason: format!("|m| = {} exceeds l = {}", cf.m.abs(), cf.l),
                    });
                }
                if !cf.value.is_finite() {
                    return Err(Error::Surface {
                        param: format!("coefficients[{i}]"),
                        reason: "value must be finite".into(),
                    });
                }
                harmonic_degree = harmonic_degree.max(cf.l);
            }
        }
    }
    let surface = Surface {
        spec,
        harmonic_degree,
    };
    if let SurfaceSpec::StarShaped { .. } = surface.spec {
        let (n_t, n_p) = (96, 192);
        let mut r_min = f64::INFINITY;
        for i in 0..=n_t {
            let theta = PI * i as f64 / n_t as f64;
            for q in 0..n_p {
                let phi = 2.0 * PI * q as f64 / n_p as f64;
                r_min = r_min.min(surface.radial(theta, phi).0);
            }
        }
        if r_min <= 0.0 {
            return Err(Error::Surface {
                param: "coefficients".into(),
                reason: format!("radial function reaches {r_min:.6} <= 0"),
            });
        }
    }
    Ok(surface)
}

impl Surface {
    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    /// Radius of the sphere, if this surface is one.
    pub fn sphere_radius(&self) -> Option<f64> {
        match self.spec {
            SurfaceSpec::Sphere { radius } => Some(radius),
            SurfaceSpec::Ellipsoid { a, b, c } if a == b && b == c => Some(a),
            SurfaceSpec::StarShaped {
                base_radius,
                ref coefficients,
            } if coefficients.iter().all(|c| c.value == 0.0) => Some(base_radius),
            _ => None,
        }
    }

    /// Radial function of star-shaped surfaces with its `θ` and `φ` derivatives.
    fn radial(&self, theta: f64, phi: f64) -> (f64, f64, f64) {
        match &self.spec {
            SurfaceSpec::StarShaped {
                base_radius,
                coefficients,
            } => {
                if coefficients.is_empty() {
                    return (*base_radius, 0.0, 0.0);
                }
                let y = real_harmonics(self.harmonic_degree, theta, phi);
                let mut r = *base_radius;
                let mut r_t = 0.0;
                let mut r_p = 0.0;
                for cf in coefficients {
                    let idx = RealHarmonics::index(cf.l, cf.m);
                    r += cf.value * y.values[idx];
                    r_t += cf.value * y.d_theta[idx];
                    r_p += cf.value * y.d_phi[idx];
                }
                (r, r_t, r_p)
            }
            _ => unreachable!("radial() is only used for star-shaped surfaces"),
        }
    }

    /// Evaluate the parametrization and its tangents.
    pub fn evaluate(&self, theta: f64, phi: f64) -> SurfacePoint {
        let (radial, e_theta, d_radial_phi) = direction(theta, phi);
        match &self.spec {
            SurfaceSpec::Sphere { radius } => SurfacePoint {
                position: radial * *radius,
                d_theta: e_theta * *radius,
                d_phi: d_radial_phi * *radius,
            },
            SurfaceSpec::Ellipsoid { a, b, c } => {
                let scale = Vec3::new(*a, *b, *c);
                SurfacePoint {
                    position: radial.component_mul(&scale),
                    d_theta: e_theta.component_mul(&scale),
                    d_phi: d_radial_phi.component_mul(&scale),
                }
            }
            SurfaceSpec::StarShaped { .. } => {
                let (r, r_t, r_p) = self.radial(theta, phi);
                SurfacePoint {
                    position: radial * r,
                    d_theta: radial * r_t + e_theta * r,
                    d_phi: radial * r_p + d_radial_phi * r,
                }
            }
        }
    }

    /// Point on the surface at `(θ, φ)`.
    pub fn point(&self, theta: f64, phi: f64) -> Vec3 {
        self.evaluate(theta, phi).position
    }

    /// Unit outward normal at `(θ, φ)`.
    ///
    /// The tangent cross product degenerates at the poles; there the normal
    /// is taken as the limit along the meridian `φ`.
    pub fn normal(&self, theta: f64, phi: f64) -> Vec3 {
        let eps = 1e-7;
        let t = theta.clamp(eps, PI - eps);
        let sp = self.evaluate(t, phi);
        let n = sp.d_theta.cross(&sp.d_phi);
        n / n.norm()
    }

    /// Whether `p` lies strictly inside the closed surface.
    pub fn contains(&self, p: &Vec3) -> bool {
        match &self.spec {
            SurfaceSpec::Sphere { radius } => p.norm() < *radius,
            SurfaceSpec::Ellipsoid { a, b, c } => {
                (p.x / a).powi(2) + (p.y / b).powi(2) + (p.z / c).powi(2) < 1.0
            }
            SurfaceSpec::StarShaped { .. } => {
                let r = p.norm();
                if r == 0.0 {
                    return true;
                }
                let theta = (p.z / r).clamp(-1.0, 1.0).acos();
                let phi = p.y.atan2(p.x);
                r < self.radial(theta, phi).0
            }
        }
    }
}

/// Quadrature nodes on `∂Ω` with outward normals and area weights.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid {
    pub nodes: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub weights: Vec<f64>,
    /// Parameter values `(θ, φ)` of each node.
    pub params: Vec<(f64, f64)>,
    pub resolution: (usize, usize),
    pub centroid: Vec3,
}

/// Build the Gauss–Legendre × trapezoid grid of `surface`.
pub fn quadrature_grid(surface: &Surface, n_theta: usize, n_phi: usize) -> Result<BoundaryGrid> {
    if n_theta < 4 || n_phi < 8 {
        return Err(Error::Resolution { n_theta, n_phi });
    }
    let (t, wt) = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let count = n_theta * n_phi;
    let mut nodes = Vec::with_capacity(count);
    let mut normals = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    let mut params = Vec::with_capacity(count);
    // descending θ order of the GL nodes keeps θ ascending
    for i in (0..n_theta).rev() {
        let theta = t[i].acos();
        let sin_theta = theta.sin();
        for q in 0..n_phi {
            let phi = q as f64 * dphi;
            let sp = surface.evaluate(theta, phi);
            let cross = sp.d_theta.cross(&sp.d_phi);
            let jac = cross.norm();
            nodes.push(sp.position);
            normals.push(cross / jac);
            weights.push(wt[i] * dphi * jac / sin_theta);
            params.push((theta, phi));
        }
    }
    let total: f64 = weights.iter().sum();
    let centroid = nodes
        .iter()
        .zip(&weights)
        .fold(Vec3::zeros(), |acc, (x, w)| acc + x * *w)
        / total;
    Ok(BoundaryGrid {
        nodes,
        normals,
        weights,
        params,
        resolution: (n_theta, n_phi),
        centroid,
    })
}

impl BoundaryGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature estimate of the surface area `S`.
    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: n,
            });
        }
        Ok(())
    }

    /// `sqrt(Σ w_i |v_i|²)`, the `L²(∂Ω)` norm of a sampled trace.
    pub fn l2_norm(&self, values: &[Complex64]) -> Result<f64> {
        self.check_len(values.len())?;
        Ok(self
            .weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v.norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `Σ w_i a_i conj(b_i)`.
    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Result<Complex64> {
        self.check_len(a.len())?;
        self.check_len(b.len())?;
        Ok(self
            .weights
            .iter()
            .zip(a.iter().zip(b))
            .map(|(w, (x, y))| x * y.conj() * *w)
            .sum())
    }

    /// Sample a function of position and outward normal at every node.
    pub fn sample<F>(&self, f: F) -> Vec<Complex64>
    where
        F: Fn(&Vec3, &Vec3) -> Complex64,
    {
        self.nodes
            .iter()
            .zip(&self.normals)
            .map(|(x, n)| f(x, n))
            .collect()
    }

    /// Write `x,y,z,nx,ny,nz,w` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,y,z,nx,ny,nz,w")?;
        for ((x, n), w) in self.nodes.iter().zip(&self.normals).zip(&self.weights) {
            writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                x.x, x.y, x.z, n.x, n.y, n.z, w
            )?;
        }
        Ok(())
    }
}

/// Sampled values of a field (or its normal derivative) on a grid.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryTrace<'g> {
    grid: &'g BoundaryGrid,
    values: &'g [Complex64],
}

impl<'g> BoundaryTrace<'g> {
    pub fn new(grid: &'g BoundaryGrid, values: &'g [Complex64]) -> Result<Self> {
        grid.check_len(values.len())?;
        Ok(BoundaryTrace { grid, values })
    }

    pub fn values(&self) -> &[Complex64] {
        self.values
    }

    pub fn l2_norm(&self) -> f64 {
        self.grid
            .l2_norm(self.values)
            .expect("length checked at construction")
    }
}

/// `‖trace‖_{L²(∂Ω)}` for a trace sampled on `grid`.
pub fn l2_norm(grid: &BoundaryGrid, values: &[Complex64]) -> Result<f64> {
    grid.l2_norm(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(r: f64) -> Surface {
        build_surface(SurfaceSpec::Sphere { radius: r }).unwrap()
    }

    #[test]
    fn sphere_equator_point_and_normal() {
        let s = sphere(1.0);
        let p = s.point(PI / 2.0, 0.0);
        assert!((p - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
        let n = s.normal(PI / 2.0, 0.0);
        assert!((n - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pole_normal_points_outward() {
        let s = sphere(2.0);
        assert!((s.normal(0.0, 0.3) - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-6);
        assert!((s.normal(PI, 0.3) - Vec3::new(0.0, 0.0, -1.0)).norm() < 1e-6);
    }

    #[test]
    fn degenerate_ellipsoid_and_flat_star_match_sphere() {
        let s = sphere(2.0);
        let e = build_surface(SurfaceSpec::Ellipsoid {
            a: 2.0,
            b: 2.0,
            c: 2.0,
        })
        .unwrap();
        let u = sphere(1.0);
        let star = build_surface(SurfaceSpec::StarShaped {
            base_radius: 1.0,
            coefficients: vec![HarmonicCoefficient {
                l: 2,
                m: 1,
                value: 0.0,
            }],
        })
        .unwrap();
        for &(t, p) in &[(0.3, 0.1), (1.2, 2.5), (2.9, 5.9)] {
            assert!((s.point(t, p) - e.point(t, p)).norm() < 1e-15);
            assert!((s.normal(t, p) - e.normal(t, p)).norm() < 1e-15);
            assert!((u.point(t, p) - star.point(t, p)).norm() < 1e-15);
            assert!((u.normal(t, p) - star.normal(t, p)).norm() < 1e-14);
        }
    }

    #[test]
    fn invalid_specs_name_the_parameter() {
        let err = build_surface(SurfaceSpec::Ellipsoid {
            a: 1.0,
            b: -1.0,
            c: 1.0,
        })
        .unwrap_err();
        assert!(matches!(err, Error::Surface { ref param, .. } if param == "b"));
        let err = build_surface(SurfaceSpec::Sphere { radius: 0.0 }).unwrap_err();
        assert!(matches!(err, Error::Surface { ref param, .. } if param == "radius"));
        // Y_00 = 1/(2√π) ≈ 0.282, so -4 Y_00 pushes the radius below zero
        let err = build_surface(SurfaceSpec::StarShaped {
            base_radius: 1.0,
            coefficients: vec![HarmonicCoefficient {
                l: 0,
                m: 0,
                value: -4.0,
            }],
        })
        .unwrap_err();
        assert!(matches!(err, Error::Surface { ref param, .. } if param == "coefficients"));
        let err = build_surface(SurfaceSpec::StarShaped {
            base_radius: 1.0,
            coefficients: vec![HarmonicCoefficient {
                l: 1,
                m: 2,
                value: 0.1,
            }],
        })
        .unwrap_err();
        assert!(matches!(err, Error::Surface { .. }));
    }

    #[test]
    fn resolution_minimum_enforced() {
        let s = sphere(1.0);
        assert!(matches!(
            quadrature_grid(&s, 3, 8),
            Err(Error::Resolution { .. })
        ));
        assert!(quadrature_grid(&s, 4, 7).is_err());
        assert!(quadrature_grid(&s, 4, 8).is_ok());
    }

    #[test]
    fn unit_sphere_area_and_norms() {
        let g = quadrature_grid(&sphere(1.0), 16, 32).unwrap();
        assert!((g.area() - 4.0 * PI).abs() / (4.0 * PI) < 1e-12);
        let ones = vec![Complex64::new(1.0, 0.0); g.len()];
        assert!((g.l2_norm(&ones).unwrap() - 2.0 * PI.sqrt()).abs() < 1e-12);
        let zeros = vec![Complex64::new(0.0, 0.0); g.len()];
        assert_eq!(g.l2_norm(&zeros).unwrap(), 0.0);
        assert!(matches!(
            g.l2_norm(&ones[1..]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(BoundaryTrace::new(&g, &ones[..5]).is_err());
    }

    #[test]
    fn plane_wave_trace_norm_is_sqrt_area() {
        let surf = build_surface(SurfaceSpec::Ellipsoid {
            a: 1.5,
            b: 1.0,
            c: 0.8,
        })
        .unwrap();
        let g = quadrature_grid(&surf, 24, 48).unwrap();
        let d = Vec3::new(0.0, 0.6, 0.8);
        let k = 3.0;
        let trace = g.sample(|x, _| Complex64::new(0.0, k * x.dot(&d)).exp());
        let t = BoundaryTrace::new(&g, &trace).unwrap();
        assert!((t.l2_norm() - g.area().sqrt()).abs() < 1e-12);
    }

    #[test]
    fn legendre_exactness_on_sphere() {
        let n_theta = 10;
        let g = quadrature_grid(&sphere(1.0), n_theta, 20).unwrap();
        for l in 1..=(2 * n_theta - 1) {
            let vals = g.sample(|x, _| {
                let p = crate::special::legendre_values(l, x.z.clamp(-1.0, 1.0)).unwrap();
                Complex64::new(p[l], 0.0)
            });
            let s: Complex64 = vals.iter().zip(&g.weights).map(|(v, w)| v * *w).sum();
            assert!(s.norm() < 1e-12, "l={l}: {s}");
        }
    }

    #[test]
    fn normals_are_unit_outward_and_orthogonal_to_tangents() {
        let surfaces = [
            SurfaceSpec::Ellipsoid {
                a: 2.0,
                b: 1.0,
                c: 1.0,
            },
            SurfaceSpec::StarShaped {
                base_radius: 1.0,
                coefficients: vec![
                    HarmonicCoefficient { l: 2, m: 0, value: 0.15 },
                    HarmonicCoefficient { l: 3, m: -2, value: 0.05 },
                ],
            },
        ];
        let h = 1e-6;
        for spec in surfaces {
            let surf = build_surface(spec).unwrap();
            let g = quadrature_grid(&surf, 12, 24).unwrap();
            for ((x, n), &(t, p)) in g.nodes.iter().zip(&g.normals).zip(&g.params) {
                assert!((n.norm() - 1.0).abs() < 1e-12);
                assert!(n.dot(&(x - g.centroid)) > 0.0);
                let ft = (surf.point(t + h, p) - surf.point(t - h, p)) / (2.0 * h);
                let fp = (surf.point(t, p + h) - surf.point(t, p - h)) / (2.0 * h);
                assert!(ft.dot(n).abs() < 1e-8 * ft.norm().max(1.0));
                assert!(fp.dot(n).abs() < 1e-8 * fp.norm().max(1.0));
            }
            assert!(g.weights.iter().all(|w| *w > 0.0));
        }
    }
}
