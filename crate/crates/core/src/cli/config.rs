//! Experiment configuration: TOML file plus command-line overrides.
//!
//! Every hypothesis is checked by [`ExperimentConfig::prepare`] before any
//! numerical work starts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use super::expr::GammaExpr;
use crate::error::{Error, Result};
use crate::geometry::{build_surface, quadrature_grid, BoundaryGrid, Surface, SurfaceSpec, Vec3};
use crate::impedance::Impedance;
use crate::mfs::{DEFAULT_DTN_DEGREE, DEFAULT_DTN_RESOLUTION, DEFAULT_DTN_SHRINK, DEFAULT_SHRINK};

fn config_err(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ConventionConfig {
    /// `∂/∂n + kγ`
    #[default]
    Scaled,
    /// `∂/∂n + γ`
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpedanceConfig {
    /// Formula in `theta`, `phi`, `sin`, `cos`, `i`, `+`, `-`, `*`.
    pub gamma: String,
    #[serde(default)]
    pub convention: ConventionConfig,
}

impl Default for ImpedanceConfig {
    fn default() -> Self {
        ImpedanceConfig {
            gamma: "i".into(),
            convention: ConventionConfig::Scaled,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionConfig {
    #[serde(default = "default_grid")]
    pub grid: [usize; 2],
    #[serde(default = "default_sphere")]
    pub sphere: [usize; 2],
    pub l_max: Option<usize>,
}

fn default_grid() -> [usize; 2] {
    [32, 64]
}

fn default_sphere() -> [usize; 2] {
    [64, 128]
}

impl Default for ResolutionConfig {
    fn default() -> Self {
        ResolutionConfig {
            grid: default_grid(),
            sphere: default_sphere(),
            l_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MfsConfig {
    #[serde(default = "default_shrink")]
    pub shrink: f64,
    /// Defaults to half the node count.
    pub sources: Option<usize>,
}

fn default_shrink() -> f64 {
    DEFAULT_SHRINK
}

impl Default for MfsConfig {
    fn default() -> Self {
        MfsConfig {
            shrink: DEFAULT_SHRINK,
            sources: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default = "default_shift_re")]
    pub a: Vec<f64>,
    #[serde(default = "default_shift_im")]
    pub b: Vec<f64>,
    /// Defaults to true for non-spherical surfaces.
    pub dtn: Option<bool>,
    #[serde(default = "default_dtn_degree")]
    pub dtn_degree: usize,
    #[serde(default = "default_dtn_grid")]
    pub dtn_grid: [usize; 2],
    #[serde(default = "default_dtn_shrink")]
    pub dtn_shrink: f64,
    pub dtn_sources: Option<usize>,
}

fn default_shift_re() -> Vec<f64> {
    (0..41).map(|i| -20.0 + i as f64).collect()
}

fn default_shift_im() -> Vec<f64> {
    vec![0.1, 1.0, 10.0]
}

fn default_dtn_degree() -> usize {
    DEFAULT_DTN_DEGREE
}

fn default_dtn_grid() -> [usize; 2] {
    [DEFAULT_DTN_RESOLUTION.0, DEFAULT_DTN_RESOLUTION.1]
}

fn default_dtn_shrink() -> f64 {
    DEFAULT_DTN_SHRINK
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            a: default_shift_re(),
            b: default_shift_im(),
            dtn: None,
            dtn_degree: DEFAULT_DTN_DEGREE,
            dtn_grid: default_dtn_grid(),
            dtn_shrink: DEFAULT_DTN_SHRINK,
            dtn_sources: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "SurfaceSpec::unit_sphere")]
    pub surface: SurfaceSpec,
    #[serde(default)]
    pub impedance: ImpedanceConfig,
    #[serde(default = "default_k")]
    pub k: Vec<f64>,
    #[serde(default = "default_incident")]
    pub incident: [f64; 3],
    #[serde(default)]
    pub resolution: ResolutionConfig,
    #[serde(default)]
    pub mfs: MfsConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn default_k() -> Vec<f64> {
    vec![1.0]
}

fn default_incident() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            surface: SurfaceSpec::unit_sphere(),
            impedance: ImpedanceConfig::default(),
            k: default_k(),
            incident: default_incident(),
            resolution: ResolutionConfig::default(),
            mfs: MfsConfig::default(),
            spectrum: SpectrumConfig::default(),
            out: None,
            seed: 0,
        }
    }
}

/// Flag values that replace the corresponding config entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub k: Option<Vec<f64>>,
    pub gamma: Option<String>,
    pub surface: Option<SurfaceSpec>,
    pub resolution: Option<[usize; 2]>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// `"1,2.5,4"` into a k list.
pub fn parse_k_list(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .enumerate()
        .map(|(i, t)| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| config_err(format!("k[{i}]"), format!("not a number: '{}'", t.trim())))
        })
        .collect()
}

/// `"32x64"` into `[n_theta, n_phi]`.
pub fn parse_resolution(s: &str) -> Result<[usize; 2]> {
    let bad = || config_err("resolution", format!("expected NTHETAxNPHI, got '{s}'"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok([
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ])
}

/// `sphere`, `sphere:R` or `ellipsoid:a,b,c`.
pub fn parse_surface(s: &str) -> Result<SurfaceSpec> {
    let (kind, args) = s.split_once(':').unwrap_or((s, ""));
    let nums: Vec<f64> = if args.trim().is_empty() {
        Vec::new()
    } else {
        args.split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| config_err("surface", format!("not a number: '{}'", t.trim())))
            })
            .collect::<Result<_>>()?
    };
    match (kind.trim(), nums.as_slice()) {
        ("sphere", []) => Ok(SurfaceSpec::unit_sphere()),
        ("sphere", &[radius]) => Ok(SurfaceSpec::Sphere { radius }),
        ("ellipsoid", &[a, b, c]) => Ok(SurfaceSpec::Ellipsoid { a, b, c }),
        _ => Err(config_err(
            "surface",
            format!("expected sphere, sphere:R or ellipsoid:a,b,c, got '{s}'"),
        )),
    }
}

/// A validated configuration with its derived objects.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub surface: Surface,
    pub gamma: GammaExpr,
    pub incident: Vec3,
    /// Collocation grid at the configured resolution.
    pub grid: BoundaryGrid,
}

fn check_resolution(field: &str, r: [usize; 2]) -> Result<()> {
    if r[0] < 4 || r[1] < 8 {
        return Err(config_err(
            field,
            format!("at least 4 x 8 required, got {} x {}", r[0], r[1]),
        ));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<ExperimentConfig> {
        toml::from_str(s).map_err(|e| config_err("config", e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err("config", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(k) = &o.k {
            self.k = k.clone();
        }
        if let Some(g) = &o.gamma {
            self.impedance.gamma = g.clone();
        }
        if let Some(s) = &o.surface {
            self.surface = s.clone();
        }
        if let Some(r) = o.resolution {
            self.resolution.grid = r;
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(out) = &o.out {
            self.out = Some(out.clone());
        }
    }

    /// Validate every hypothesis and build the surface and grid.
    pub fn prepare(&self) -> Result<Prepared> {
        if self.k.is_empty() {
            return Err(config_err("k", "at least one wavenumber required"));
        }
        for (i, &k) in self.k.iter().enumerate() {
            if !(k > 0.0 && k.is_finite()) {
                return Err(config_err(format!("k[{i}]"), format!("k > 0 required, got {k}")));
            }
        }
        let d = Vec3::from(self.incident);
        if !(d.norm() > 0.0 && d.norm().is_finite()) {
            return Err(config_err("incident", "must be a nonzero finite vector"));
        }
        check_resolution("resolution.grid", self.resolution.grid)?;
        check_resolution("resolution.sphere", self.resolution.sphere)?;
        if !(self.mfs.shrink > 0.0 && self.mfs.shrink < 1.0) {
            return Err(config_err(
                "mfs.shrink",
                format!("must lie in (0, 1), got {}", self.mfs.shrink),
            ));
        }
        let surface = build_surface(self.surface.clone()).map_err(|e| config_err("surface", e.to_string()))?;
        let gamma = GammaExpr::parse(&self.impedance.gamma)
            .map_err(|e| config_err("impedance.gamma", e.to_string()))?;
        let grid = quadrature_grid(&surface, self.resolution.grid[0], self.resolution.grid[1])?;
        let min_imag = grid
            .params
            .iter()
            .map(|&(t, p)| gamma.eval(t, p).im)
            .fold(f64::INFINITY, f64::min);
        if !(min_imag > 0.0) {
            return Err(config_err(
                "impedance.gamma",
                format!("Im gamma > 0 required on the surface, minimum is {min_imag}"),
            ));
        }
        if let Some(m) = self.mfs.sources {
            if m == 0 || m > grid.len() {
                return Err(config_err(
                    "mfs.sources",
                    format!("must lie in 1..={}, got {m}", grid.len()),
                ));
            }
        }
        let s = &self.spectrum;
        for (i, &b) in s.b.iter().enumerate() {
            if !(b > 0.0 && b.is_finite()) {
                return Err(config_err(format!("spectrum.b[{i}]"), format!("b > 0 required, got {b}")));
            }
        }
        if s.a.iter().any(|a| !a.is_finite()) {
            return Err(config_err("spectrum.a", "shifts must be finite"));
        }
        check_resolution("spectrum.dtn_grid", s.dtn_grid)?;
        if !(s.dtn_shrink > 0.0 && s.dtn_shrink < 1.0) {
            return Err(config_err(
                "spectrum.dtn_shrink",
                format!("must lie in (0, 1), got {}", s.dtn_shrink),
            ));
        }
        Ok(Prepared {
            config: self.clone(),
            surface,
            gamma,
            incident: d.normalize(),
            grid,
        })
    }
}

impl Prepared {
    /// Sample the configured impedance on `grid` for wavenumber `k`.
    pub fn impedance(&self, k: f64, grid: &BoundaryGrid) -> Result<Impedance> {
        let values: Vec<Complex64> = grid.params.iter().map(|&(t, p)| self.gamma.eval(t, p)).collect();
        match self.config.impedance.convention {
            ConventionConfig::Scaled => Impedance::scaled(k, values),
            ConventionConfig::Direct => Impedance::direct(values),
        }
    }

    /// `γ` of the `∂/∂n + kγ` form when the impedance is constant.
    pub fn constant_scaled_gamma(&self, k: f64) -> Option<Complex64> {
        let g = self.gamma.constant()?;
        Some(match self.config.impedance.convention {
            ConventionConfig::Scaled => g,
            ConventionConfig::Direct => g / k,
        })
    }

    /// Radius when the surface is a sphere and the impedance is constant,
    /// i.e. when the modal solution applies.
    pub fn mie_radius(&self) -> Option<f64> {
        self.gamma.constant()?;
        self.surface.sphere_radius()
    }
}
