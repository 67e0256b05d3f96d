use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::warn;

use wheeltrace::bench::{run_bench, size_grid, DEFAULT_EXTENTS, DEFAULT_RESOLUTIONS, REFERENCE_REMESH_MS_AT_1M};
use wheeltrace::depth_model::{bundled_measurements, load_measurements, DepthModel, PUBLISHED_AMP, PUBLISHED_MU};
use wheeltrace::scenario::{simulate, ScenarioConfig};
use wheeltrace::timing::SweepOptions;
use wheeltrace::{Heightmap, PixelRegion};

/// Wheel-trace terrain deformation: model fitting, scripted drives, export
/// and timing.
#[derive(Parser)]
#[command(name = "wheeltrace", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the load-to-depth model to trough/crest measurements.
    Fit(FitArgs),
    /// Run a scripted traversal described by a config file.
    Simulate(SimulateArgs),
    /// Time stamping and full re-meshing across map sizes.
    Bench(BenchArgs),
    /// Convert a height map file to an OBJ mesh.
    Export(ExportArgs),
}

#[derive(Args)]
struct FitArgs {
    /// CSV with `load_n,trough_mm,crest_mm` rows; the bundled data if omitted.
    csv: Option<PathBuf>,
    /// Where to write the fitted model.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Terrain seed; overrides `terrain.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Map extents in m, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_EXTENTS)]
    sizes: Vec<f64>,
    /// Resolutions in m/texel, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_RESOLUTIONS)]
    resolutions: Vec<f64>,
    /// Stamps timed per configuration.
    #[arg(long, default_value_t = SweepOptions::default().stamps)]
    stamps: usize,
    /// CSV report path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    heightmap: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Inclusive texel bounds `c0,r0,c1,r1`.
    #[arg(long, value_parser = parse_region)]
    region: Option<PixelRegion>,
}

fn parse_region(s: &str) -> Result<PixelRegion, String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("expected c0,r0,c1,r1: {e}"))?;
    match v[..] {
        [c0, r0, c1, r1] if c0 <= c1 && r0 <= r1 => Ok(PixelRegion::new(c0, r0, c1, r1)),
        [_, _, _, _] => Err("need c0 <= c1 and r0 <= r1".into()),
        _ => Err(format!("expected 4 values, got {}", v.len())),
    }
}

fn cmd_fit(args: FitArgs) -> Result<()> {
    let rows = match &args.csv {
        Some(p) => load_measurements(p).with_context(|| format!("reading {}", p.display()))?,
        None => bundled_measurements(),
    };
    let model = DepthModel::fit(&rows).context("fitting depth model")?;
    println!("measurements  {} rows, load {} .. {} N", rows.len(), model.load_range[0], model.load_range[1]);
    println!(
        "mean          mu(F) = {:.4} + {:.4} F mm   (published {} + {} F)",
        model.mu.intercept, model.mu.slope, PUBLISHED_MU.intercept, PUBLISHED_MU.slope
    );
    println!(
        "amplitude     A(F)  = {:.4} + {:.4} F mm   (published {} + {} F)",
        model.amp.intercept, model.amp.slope, PUBLISHED_AMP.intercept, PUBLISHED_AMP.slope
    );
    if let Some(e) = model.errors {
        println!("mean fit      MAE {:.4} mm, MPE {:.3} %", e.mean.mae, e.mean.mpe_percent);
        println!("amp fit       MAE {:.4} mm, MPE {:.3} %", e.amplitude.mae, e.amplitude.mpe_percent);
    }
    if let Some(out) = &args.out {
        model.save(out).with_context(|| format!("writing {}", out.display()))?;
        println!("model written to {}", out.display());
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let mut config = ScenarioConfig::load(&args.config).with_context(|| format!("loading {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        config.terrain.seed = seed;
    }
    let out_dir = match args.out {
        Some(dir) => dir,
        None => config.resolve(&config.output.dir),
    };
    let summary = simulate(&config, &out_dir)?;
    print!("{}", summary.to_text());
    println!("outputs in {}", out_dir.display());
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    if let Some(bad) = args.sizes.iter().chain(&args.resolutions).find(|v| !(v.is_finite() && **v > 0.0)) {
        bail!("sizes and resolutions must be positive, got {bad}");
    }
    let sizes = size_grid(&args.sizes, &args.resolutions);
    let opts = SweepOptions {
        stamps: args.stamps.max(1),
        ..SweepOptions::default()
    };
    let report = run_bench(&sizes, &opts)?;
    match &args.out {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            report.write_csv(BufWriter::new(file))?;
            eprintln!(
                "{} rows written to {}; remesh r2 = {:.4}, {:.3} ms at 1e6 texels (reference {} ms)",
                report.rows.len(),
                p.display(),
                report.remesh_r2,
                report.remesh_ms_at_1m(),
                REFERENCE_REMESH_MS_AT_1M
            );
        }
        None => report.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let map = Heightmap::load(&args.heightmap).with_context(|| format!("reading {}", args.heightmap.display()))?;
    let region = match args.region {
        Some(r) => match map.clamp_region(r) {
            Some((clamped, true)) => {
                warn!(
                    "region {},{},{},{} exceeds the {}x{} map; clamped to {},{},{},{}",
                    r.min_col,
                    r.min_row,
                    r.max_col,
                    r.max_row,
                    map.cols(),
                    map.rows(),
                    clamped.min_col,
                    clamped.min_row,
                    clamped.max_col,
                    clamped.max_row
                );
                clamped
            }
            Some((clamped, false)) => clamped,
            None => bail!("region lies entirely outside the {}x{} map", map.cols(), map.rows()),
        },
        None => map.full_region(),
    };
    let mesh = map.export_mesh(Some(region))?;
    let file = File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut w = BufWriter::new(file);
    mesh.write_obj(&mut w)?;
    w.flush()?;
    println!(
        "{} vertices, {} faces written to {}",
        mesh.vertices.len(),
        mesh.faces.len(),
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Export(a) => cmd_export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
