//! Subcommand bodies. Each returns the files it wants written; nothing
//! touches the disk until every computation has succeeded.

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::config::Prepared;
use crate::bounds::far_field::{gradient_fd_error, random_directions};
use crate::bounds::verify::SWEEP_HEADER;
use crate::bounds::{
    certify, direction_grid, greens_identity_check, total_cross_section, verify_all, FarFieldGrid,
    Instance, Resolutions, VerdictTable,
};
use crate::error::{Error, Result};
use crate::field::PlaneWave;
use crate::geometry::{quadrature_grid, BoundaryGrid};
use crate::impedance::Impedance;
use crate::mfs::{
    boundary_residual, default_dtn_source_count, default_source_count, dtn_matrix, place_sources,
    solve_impedance, MfsSolution,
};
use crate::mie::{default_l_max, dtn_sphere_spectrum, mie_solve, resolvent_check, MieSolution};

/// Random directions used for the far-field gradient spot check.
pub const GRADIENT_CHECK_DIRECTIONS: usize = 20;
pub const GRADIENT_CHECK_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    SolveCertify,
    Bounds,
    Sweep,
    Mie,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::SolveCertify => "solve-certify",
            Command::Bounds => "bounds",
            Command::Sweep => "sweep",
            Command::Mie => "mie",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub name: String,
    pub contents: String,
}

fn output(name: &str, contents: String) -> Output {
    Output {
        name: name.into(),
        contents,
    }
}

fn e(x: f64) -> String {
    format!("{x:.12e}")
}

fn json_text(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))
}

/// Command-specific checks, still before any computation.
pub fn validate_for(command: Command, p: &Prepared) -> Result<()> {
    let cfg_err = |field: &str, reason: &str| Error::Config {
        field: field.into(),
        reason: reason.into(),
    };
    match command {
        Command::Mie if p.mie_radius().is_none() => Err(cfg_err(
            "surface",
            "mie requires a sphere with constant impedance",
        )),
        Command::Bounds if p.config.k.len() != 1 => Err(cfg_err(
            "k",
            "bounds takes a single wavenumber; use sweep for a list",
        )),
        _ => Ok(()),
    }
}

pub fn run(command: Command, p: &Prepared) -> Result<Vec<Output>> {
    validate_for(command, p)?;
    match command {
        Command::Spectrum => spectrum(p),
        Command::SolveCertify => solve_certify(p),
        Command::Bounds => bounds(p),
        Command::Sweep => sweep(p),
        Command::Mie => mie(p),
    }
}

/// Write each output to a temporary file in `dir`, then rename it into place.
pub fn write_outputs(dir: &Path, outputs: &[Output]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for o in outputs {
        let tmp = dir.join(format!(".{}.tmp", o.name));
        fs::write(&tmp, &o.contents)?;
        fs::rename(&tmp, dir.join(&o.name))?;
    }
    Ok(())
}

fn mie_for(p: &Prepared, k: f64) -> Result<Option<MieSolution>> {
    let (Some(radius), Some(gamma)) = (p.mie_radius(), p.constant_scaled_gamma(k)) else {
        return Ok(None);
    };
    let l_max = p.config.resolution.l_max.unwrap_or_else(|| default_l_max(k, radius));
    mie_solve(k, radius, gamma, p.incident, l_max).map(Some)
}

struct MfsRun {
    solution: MfsSolution,
    eta: Impedance,
}

fn mfs_for(p: &Prepared, k: f64) -> Result<MfsRun> {
    let grid = &p.grid;
    let eta = p.impedance(k, grid)?;
    let rhs = PlaneWave::new(k, p.incident).impedance_rhs(grid, &eta);
    let count = p.config.mfs.sources.unwrap_or_else(|| default_source_count(grid));
    let sources = place_sources(&p.surface, grid, p.config.mfs.shrink, count)?;
    let solution = solve_impedance(grid, &sources, k, &eta, &rhs)?;
    Ok(MfsRun { solution, eta })
}

fn check_grid(p: &Prepared) -> Result<BoundaryGrid> {
    let [nt, np] = p.config.resolution.grid;
    quadrature_grid(&p.surface, nt + nt / 2, np + np / 2)
}

fn spectrum(p: &Prepared) -> Result<Vec<Output>> {
    let cfg = &p.config;
    let want_dtn = cfg.spectrum.dtn.unwrap_or(p.surface.sphere_radius().is_none());
    let per_k: Vec<(String, Value)> = cfg
        .k
        .par_iter()
        .map(|&k| -> Result<(String, Value)> {
            let mut csv = String::new();
            let mut report = json!({ "k": k });
            if let Some(radius) = p.surface.sphere_radius() {
                let l_max = cfg.resolution.l_max.unwrap_or_else(|| default_l_max(k, radius));
                let spec = dtn_sphere_spectrum(k, radius, l_max)?;
                for (l, mu) in spec.eigenvalues.iter().enumerate() {
                    let _ = writeln!(
                        csv,
                        "{},modal,{l},{},{},{},{},{}",
                        e(k),
                        2 * l + 1,
                        e(mu.re),
                        e(mu.im),
                        e(spec.wronskian_imag(l)),
                        mu.im > 0.0
                    );
                }
                let mut worst = Vec::new();
                let mut all_hold = true;
                for &b in &cfg.spectrum.b {
                    let mut w: Option<crate::mie::ResolventMargin> = None;
                    for &a in &cfg.spectrum.a {
                        let r = resolvent_check(&spec, a, b)?;
                        all_hold &= r.holds;
                        if w.is_none_or(|x| r.margin() < x.margin()) {
                            w = Some(r);
                        }
                    }
                    if let Some(w) = w {
                        worst.push(to_value(&w)?);
                    }
                }
                report["modal"] = json!({
                    "radius": radius,
                    "l_max": l_max,
                    "min_imag": spec.eigenvalues.iter().map(|m| m.im).fold(f64::INFINITY, f64::min),
                    "all_positive": spec.eigenvalues.iter().all(|m| m.im > 0.0),
                    "resolvent_worst_per_b": worst,
                    "resolvent_holds": all_hold,
                });
            }
            if want_dtn {
                let s = &cfg.spectrum;
                let grid = quadrature_grid(&p.surface, s.dtn_grid[0], s.dtn_grid[1])?;
                let count = s.dtn_sources.unwrap_or_else(|| default_dtn_source_count(grid.len()));
                let sources = place_sources(&p.surface, &grid, s.dtn_shrink, count)?;
                let d = dtn_matrix(&grid, &sources, k, s.dtn_degree)?;
                let slack = 1e-6 * k;
                for (i, z) in d.eigenvalues.iter().enumerate() {
                    let _ = writeln!(csv, "{},dtn,{i},1,{},{},,{}", e(k), e(z.re), e(z.im), z.im >= -slack);
                }
                let mut v = to_value(&d)?;
                v["min_imag"] = json!(d.min_imag());
                v["slack"] = json!(slack);
                v["holds"] = json!(d.min_imag() >= -slack);
                v["sources"] = json!(count);
                report["dtn"] = v;
            }
            Ok((csv, report))
        })
        .collect::<Result<_>>()?;

    let mut csv = String::from("k,source,index,multiplicity,re,im,reference_im,pass\n");
    let mut reports = Vec::new();
    for (c, r) in per_k {
        csv.push_str(&c);
        reports.push(r);
    }
    let report = json!({
        "command": "spectrum",
        "config": to_value(&p.config)?,
        "results": reports,
    });
    Ok(vec![output("spectrum.csv", csv), output("report.json", json_text(&report)?)])
}

fn solve_certify(p: &Prepared) -> Result<Vec<Output>> {
    let cfg = &p.config;
    let with_oracle = p.mie_radius().is_some();
    let [st, sp] = cfg.resolution.sphere;
    let dirs = direction_grid(st, sp)?;
    let check = check_grid(p)?;
    let probe = random_directions(GRADIENT_CHECK_DIRECTIONS, cfg.seed);

    let rows: Vec<(String, Value)> = cfg
        .k
        .par_iter()
        .map(|&k| -> Result<(String, Value)> {
            let run = mfs_for(p, k)?;
            let sol = &run.solution;
            let eta_check = p.impedance(k, &check)?;
            let rhs_check = PlaneWave::new(k, p.incident).impedance_rhs(&check, &eta_check);
            let residual = boundary_residual(sol, &check, &eta_check, &rhs_check)?;
            let mut cert = certify(&residual, k)?;

            let (u, dnu) = sol.traces(&check)?;
            let ff = FarFieldGrid::sample(&dirs, k, p.incident, |t| sol.far_field(t));
            let green = greens_identity_check(&check, &u, &dnu, &ff)?;
            let grad_err = gradient_fd_error(sol, &probe, GRADIENT_CHECK_STEP);

            if with_oracle {
                let exact = mie_for(p, k)?.expect("oracle availability checked");
                let (ue, dnue) = exact.boundary_traces(&check)?;
                let du: Vec<Complex64> = u.iter().zip(&ue).map(|(a, b)| a - b).collect();
                let ddn: Vec<Complex64> = dnu.iter().zip(&dnue).map(|(a, b)| a - b).collect();
                let ffe = FarFieldGrid::sample(&dirs, k, p.incident, |t| exact.far_field(t));
                cert = cert.with_oracle(check.l2_norm(&du)?, check.l2_norm(&ddn)?, ff.distance_sq(&ffe)?);
            }

            let mut line = format!(
                "{},{},{},{},{},{},{},{}",
                e(k),
                sol.sources.len(),
                e(cert.residual_norm),
                e(cert.eta0),
                e(cert.eta_max),
                e(cert.bound_field),
                e(cert.bound_normal_derivative),
                e(cert.bound_far_field_sq)
            );
            if let Some(o) = cert.oracle {
                let _ = write!(
                    line,
                    ",{},{},{},{},{},{},{}",
                    e(o.error_field),
                    e(o.error_normal_derivative),
                    e(o.error_far_field_sq),
                    e(o.effectivity_field),
                    e(o.effectivity_normal_derivative),
                    e(o.effectivity_far_field),
                    o.all_at_least_one()
                );
            }
            line.push('\n');
            let report = json!({
                "k": k,
                "sources": sol.sources.len(),
                "effective_rank": sol.effective_rank,
                "condition_estimate": sol.condition_estimate,
                "collocation_grid": p.grid.resolution,
                "check_grid": check.resolution,
                "eta_convention": format!("{:?}", run.eta.convention()),
                "certificate": to_value(&cert)?,
                "green_identity": to_value(&green)?,
                "gradient_fd_max_error": grad_err,
                "cross_section": total_cross_section(&ff),
            });
            Ok((line, report))
        })
        .collect::<Result<_>>()?;

    let mut csv = String::from(
        "k,sources,residual_norm,eta0,eta_max,bound_field,bound_normal_derivative,bound_far_field_sq",
    );
    if with_oracle {
        csv.push_str(
            ",error_field,error_normal_derivative,error_far_field_sq,effectivity_field,\
             effectivity_normal_derivative,effectivity_far_field,dominates",
        );
    }
    csv.push('\n');
    let mut reports = Vec::new();
    for (line, r) in rows {
        csv.push_str(&line);
        reports.push(r);
    }
    let report = json!({
        "command": "solve-certify",
        "config": to_value(&p.config)?,
        "oracle": with_oracle,
        "gradient_check_directions": GRADIENT_CHECK_DIRECTIONS,
        "results": reports,
    });
    Ok(vec![output("verdicts.csv", csv), output("report.json", json_text(&report)?)])
}

/// Solve at `k` (modal series when available, MFS otherwise) and verify.
pub fn verify_at(p: &Prepared, k: f64) -> Result<VerdictTable> {
    let cfg = &p.config;
    let resolutions = Resolutions {
        boundary: (cfg.resolution.grid[0], cfg.resolution.grid[1]),
        sphere: (cfg.resolution.sphere[0], cfg.resolution.sphere[1]),
    };
    let eta = p.impedance(k, &p.grid)?;
    let (gamma0, gamma_max) = (eta.eta0() / k, eta.eta_max() / k);
    let instance = match mie_for(p, k)? {
        Some(sol) => {
            let spectrum = dtn_sphere_spectrum(k, sol.radius, sol.l_max())?;
            Instance::build(
                format!("mie k={k}"),
                &sol,
                &p.surface,
                p.incident,
                gamma0,
                gamma_max,
                resolutions,
                Some(spectrum),
            )?
        }
        None => {
            let run = mfs_for(p, k)?;
            // sources sit close to the boundary; measure on a grid twice as
            // fine as the collocation grid, which then serves as the coarse one
            let measured = Resolutions {
                boundary: (2 * resolutions.boundary.0, 2 * resolutions.boundary.1),
                ..resolutions
            };
            Instance::build(
                format!("mfs k={k}"),
                &run.solution,
                &p.surface,
                p.incident,
                gamma0,
                gamma_max,
                measured,
                None,
            )?
        }
    };
    let mut table = verify_all(&instance)?;
    table.label = instance.label.clone();
    Ok(table)
}

fn table_report(t: &VerdictTable) -> Result<Value> {
    let mut v = to_value(t)?;
    v["hard_failures"] = json!(t.hard_failures());
    v["notes"] = json!(t.finding_notes());
    v["passes"] = json!(t.passes());
    Ok(v)
}

fn bounds(p: &Prepared) -> Result<Vec<Output>> {
    let table = verify_at(p, p.config.k[0])?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    let report = json!({
        "command": "bounds",
        "config": to_value(&p.config)?,
        "table": table_report(&table)?,
    });
    Ok(vec![
        output("verdicts.csv", String::from_utf8(csv).expect("ascii csv")),
        output("report.json", json_text(&report)?),
    ])
}

fn sweep(p: &Prepared) -> Result<Vec<Output>> {
    let tables: Vec<VerdictTable> = p
        .config
        .k
        .par_iter()
        .map(|&k| verify_at(p, k))
        .collect::<Result<_>>()?;
    let mut csv = format!("{SWEEP_HEADER}\n").into_bytes();
    for t in &tables {
        t.write_sweep_rows(&mut csv)?;
    }
    let report = json!({
        "command": "sweep",
        "config": to_value(&p.config)?,
        "passes": tables.iter().all(|t| t.passes()),
        "tables": tables.iter().map(table_report).collect::<Result<Vec<_>>>()?,
    });
    Ok(vec![
        output("verdicts.csv", String::from_utf8(csv).expect("ascii csv")),
        output("report.json", json_text(&report)?),
    ])
}

fn mie(p: &Prepared) -> Result<Vec<Output>> {
    let [st, sp] = p.config.resolution.sphere;
    let dirs = direction_grid(st, sp)?;
    let mut csv = String::from("k,l,re_a,im_a,re_mu,im_mu\n");
    let mut reports = Vec::new();
    for &k in &p.config.k {
        let sol = mie_for(p, k)?.expect("validated");
        let spec = dtn_sphere_spectrum(k, sol.radius, sol.l_max())?;
        for (l, (a, mu)) in sol.coefficients.iter().zip(&spec.eigenvalues).enumerate() {
            let _ = writeln!(csv, "{},{l},{},{},{},{}", e(k), e(a.re), e(a.im), e(mu.re), e(mu.im));
        }
        let ff = FarFieldGrid::sample(&dirs, k, p.incident, |t| sol.far_field(t));
        reports.push(json!({
            "k": k,
            "radius": sol.radius,
            "gamma": [sol.gamma.re, sol.gamma.im],
            "l_max": sol.l_max(),
            "tail_ratio": sol.tail_ratio(),
            "cross_section_modal": sol.modal_cross_section(),
            "cross_section_quadrature": total_cross_section(&ff),
            "forward_amplitude": [sol.far_field(&p.incident).re, sol.far_field(&p.incident).im],
        }));
    }
    let report = json!({
        "command": "mie",
        "config": to_value(&p.config)?,
        "results": reports,
    });
    Ok(vec![output("coefficients.csv", csv), output("report.json", json_text(&report)?)])
}
