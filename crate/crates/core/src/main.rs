use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use helmcert::cli::config::{parse_k_list, parse_resolution, parse_surface};
use helmcert::cli::{run, write_outputs, Command, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "helmcert", version, about = "Impedance scattering: spectra, certificates and bound verification")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Modal DtN spectrum, resolvent margins and discrete DtN eigenvalues.
    Spectrum,
    /// MFS solve with residual-based error certificates.
    SolveCertify,
    /// Verdict table of the a-priori bounds at one wavenumber.
    Bounds,
    /// Stacked verdict tables over the k list.
    Sweep,
    /// Modal coefficients of the sphere solution.
    Mie,
}

#[derive(Args)]
struct Common {
    /// TOML experiment file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: helmcert-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated wavenumbers.
    #[arg(long, global = true, allow_hyphen_values = true)]
    k: Option<String>,
    /// Impedance formula, e.g. "i" or "i*(1 + 0.5*sin(theta))".
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// sphere, sphere:R or ellipsoid:a,b,c.
    #[arg(long, global = true)]
    surface: Option<String>,
    /// Boundary grid as NTHETAxNPHI.
    #[arg(long, global = true)]
    resolution: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

fn execute(cli: Cli) -> helmcert::Result<PathBuf> {
    let c = cli.common;
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let overrides = Overrides {
        k: c.k.as_deref().map(parse_k_list).transpose()?,
        gamma: c.gamma,
        surface: c.surface.as_deref().map(parse_surface).transpose()?,
        resolution: c.resolution.as_deref().map(parse_resolution).transpose()?,
        seed: c.seed,
        out: c.out,
    };
    cfg.apply(&overrides);
    let prepared = cfg.prepare()?;
    let command = match cli.command {
        Sub::Spectrum => Command::Spectrum,
        Sub::SolveCertify => Command::SolveCertify,
        Sub::Bounds => Command::Bounds,
        Sub::Sweep => Command::Sweep,
        Sub::Mie => Command::Mie,
    };
    let outputs = run(command, &prepared)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("helmcert-out"));
    write_outputs(&dir, &outputs)?;
    Ok(dir)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(dir) => {
            println!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
