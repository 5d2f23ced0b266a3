use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use minlap::surfaces::SurfaceSpec;
use minlap_cli::{exit_code, parse_range, run, BaseChoice, CliError, Command, Result, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "minlap",
    version,
    about = "Laplace-spectrum laboratory for complete minimal hypersurfaces"
)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Catalog surface: plane, catenoid, helicoid, linear, quadratic, cubic, scherk.
    #[arg(long)]
    surface: Option<String>,
    /// Dimension for planes and graphs.
    #[arg(long)]
    n: Option<usize>,
    /// Radii as a:b:k (k evenly spaced values).
    #[arg(long)]
    radii: Option<String>,
    /// Base point: origin or on-surface.
    #[arg(long)]
    base: Option<String>,
    /// Spectral parameter for the Weyl and Pohozaev runs.
    #[arg(long)]
    lambda: Option<f64>,
    /// Last index of the Weyl schedule
    #[arg(long)]
    m_max: Option<usize>,
    /// Output directory for report.json and the CSV tables
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write OFF meshes of the spectrum balls.
    #[arg(long)]
    export_mesh: bool,
}

fn build_config(args: &Args) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(name) = &args.surface {
        cfg.surface = SurfaceSpec::from_name(name, args.n.unwrap_or(2))?;
    } else if let Some(n) = args.n {
        if n != cfg.surface.dim() {
            return Err(CliError::Config(format!(
                "--n {n} needs --surface to rebuild the surface"
            )));
        }
    }
    if let Some(r) = &args.radii {
        let radii = parse_range(r)?;
        cfg.spectrum.radii = radii.clone();
        cfg.radii = radii;
    }
    if let Some(b) = &args.base {
        cfg.base = BaseChoice::parse(b)?;
    }
    if let Some(l) = args.lambda {
        cfg.weyl.lambda = l;
        cfg.pohozaev.lambda = l;
    }
    if let Some(m) = args.m_max {
        cfg.weyl.m_max = m;
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    cfg.export_mesh |= args.export_mesh;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = std::env::var("MINLAP_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    let outcome = build_config(&args).and_then(|cfg| run(args.command, &cfg));
    match &outcome {
        Ok(env) => {
            for v in &env.verdicts {
                println!(
                    "{} {}: {}",
                    if v.passed { "pass" } else { "FAIL" },
                    v.name,
                    v.invariant
                );
            }
        }
        Err(e) => eprintln!("minlap: {e}"),
    }
    ExitCode::from(exit_code(&outcome) as u8)
}
