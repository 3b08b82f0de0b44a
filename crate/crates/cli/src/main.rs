use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use polyannulus::acm::StageRecord;
use polyannulus::error::ErrorClass;
use polyannulus::metrics::{full_report, MetricsReport};
use polyannulus::obj::{load_mesh, load_mesh_with_uv, write_obj_string};
use polyannulus::{acm_with, pacm_with, AcmOptions, Error, PacmOptions, PlanarMesh, Result, TriMesh};

#[derive(Parser, Debug)]
#[command(name = "polyannulus", version, about = "Conformal parameterization of surfaces with holes")]
struct Cli {
    /// Print per-stage distortion to standard error.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Map a surface with one hole onto an annulus.
    Acm(MapArgs),
    /// Map a surface with k holes onto the unit disk with k circular holes.
    Pacm(MapArgs),
    /// Report distortion of a parameterized OBJ.
    Metrics {
        input: PathBuf,
        /// JSON report path (standard output if omitted).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Register the first surface onto the second with matched holes.
    Register {
        source: PathBuf,
        target: PathBuf,
        /// Correspondence file: one `source_vertex x y z` line per vertex.
        #[arg(short, long)]
        output: PathBuf,
        /// Hole pairs as `a:b,c:d` (inner loop ids); identity by default.
        #[arg(long)]
        pairs: Option<String>,
    },
}

#[derive(Args, Debug)]
struct MapArgs {
    input: PathBuf,
    /// Output OBJ with texture coordinates in [0,1]^2.
    #[arg(short, long)]
    output: PathBuf,
    /// JSON report path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Boundary loop id to use as the outer boundary.
    #[arg(long)]
    outer: Option<usize>,
    /// Second OBJ whose texture coordinates are scaled for a checkerboard.
    #[arg(long)]
    checker: Option<PathBuf>,
    /// Checkerboard cells per unit of texture space.
    #[arg(long, default_value_t = 16.0)]
    density: f64,
}

#[derive(Serialize)]
struct StageJson {
    stage: &'static str,
    mean_abs_mu: f64,
    max_abs_mu: f64,
    flips: usize,
}

impl From<&StageRecord> for StageJson {
    fn from(s: &StageRecord) -> Self {
        Self {
            stage: s.stage,
            mean_abs_mu: s.mean_abs_mu,
            max_abs_mu: s.max_abs_mu,
            flips: s.flips,
        }
    }
}

#[derive(Serialize)]
struct HoleJson {
    loop_id: usize,
    center: [f64; 2],
    radius: f64,
}

#[derive(Serialize)]
struct MapReport {
    command: &'static str,
    #[serde(flatten)]
    metrics: MetricsReport,
    stages: Vec<StageJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inner_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    length: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    holes: Vec<HoleJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mobius_alpha: Option<[f64; 2]>,
    /// Raw planar coordinates before normalization to [0,1]^2.
    uv: Vec<[f64; 2]>,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Argument(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// `(z + 1) / 2`: the unit disk into the unit square.
fn normalized(uv: &PlanarMesh) -> PlanarMesh {
    uv.map(|z| {
        let w = (z + 1.0) * 0.5;
        Complex64::new(w.re.clamp(0.0, 1.0), w.im.clamp(0.0, 1.0))
    })
}

fn write_outputs(mesh: &TriMesh, uv: &PlanarMesh, args: &MapArgs) -> Result<()> {
    let tex = normalized(uv);
    fs::write(&args.output, write_obj_string(mesh, Some(&tex))?)?;
    println!("wrote {}", args.output.display());
    if let Some(path) = &args.checker {
        let scaled = tex.map(|z| z * args.density);
        fs::write(path, write_obj_string(mesh, Some(&scaled))?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_map(command: &'static str, args: &MapArgs, verbose: bool) -> Result<()> {
    if !(args.density > 0.0 && args.density.is_finite()) {
        return Err(Error::Argument(format!("density must be positive, got {}", args.density)));
    }
    let mesh = load_mesh(&args.input)?;
    println!(
        "{command}: {} vertices, {} faces, {} boundary loops",
        mesh.num_vertices(),
        mesh.num_faces(),
        mesh.boundary_loops().len()
    );
    let mut inner_radius = None;
    let mut length = None;
    let mut holes = Vec::new();
    let mut mobius_alpha = None;
    let (uv, stages) = if command == "acm" {
        let r = acm_with(&mesh, &AcmOptions { outer: args.outer, ..Default::default() })?;
        inner_radius = Some(r.inner_radius);
        length = Some(r.length);
        (r.uv, r.stages)
    } else {
        let r = pacm_with(&mesh, &PacmOptions { outer: args.outer, ..Default::default() })?;
        holes = r
            .hole_loops
            .iter()
            .zip(&r.holes)
            .map(|(&l, c)| HoleJson {
                loop_id: l,
                center: [c.center.re, c.center.im],
                radius: c.radius,
            })
            .collect();
        let a = r.mobius.alpha();
        mobius_alpha = Some([a.re, a.im]);
        (r.uv, r.stages)
    };
    if verbose {
        for s in &stages {
            eprintln!(
                "{:>10}: mean |mu| {:.6}, max |mu| {:.6}, flips {}",
                s.stage, s.mean_abs_mu, s.max_abs_mu, s.flips
            );
        }
    }
    let report = MapReport {
        command,
        metrics: full_report(&mesh, &uv)?,
        stages: stages.iter().map(StageJson::from).collect(),
        inner_radius,
        length,
        holes,
        mobius_alpha,
        uv: uv.coords.iter().map(|z| [z.re, z.im]).collect(),
    };
    println!(
        "{command}: mean |d| {:.4} deg, flips {}",
        report.metrics.mean_abs_d, report.metrics.flips
    );
    write_outputs(&mesh, &uv, args)?;
    if let Some(path) = &args.report {
        write_json(path, &report)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_metrics(input: &Path, report: Option<&Path>) -> Result<()> {
    let (mesh, uv) = load_mesh_with_uv(input)?;
    let uv = uv.ok_or_else(|| Error::Argument(format!("{} has no per-vertex texture coordinates", input.display())))?;
    let r = full_report(&mesh, &uv)?;
    match report {
        Some(path) => {
            write_json(path, &r)?;
            println!("wrote {}", path.display());
        }
        None => println!(
            "{}",
            serde_json::to_string_pretty(&r).map_err(|e| Error::Argument(e.to_string()))?
        ),
    }
    Ok(())
}

fn parse_pairs(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|p| {
            let (a, b) = p
                .split_once(':')
                .ok_or_else(|| Error::Argument(format!("hole pair `{p}` is not of the form a:b")))?;
            let id = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Argument(format!("invalid loop id `{s}`")))
            };
            Ok((id(a)?, id(b)?))
        })
        .collect()
}

fn run_register(source: &Path, target: &Path, output: &Path, pairs: Option<&str>) -> Result<()> {
    let s1 = load_mesh(source)?;
    let s2 = load_mesh(target)?;
    let d1 = polyannulus::pacm(&s1)?;
    let d2 = polyannulus::pacm(&s2)?;
    let pairs = match pairs {
        Some(p) => parse_pairs(p)?,
        None => d1.hole_loops.iter().map(|&h| (h, h)).collect(),
    };
    let r = polyannulus::register::register_domains(&s1, &d1, &s2, &d2, &pairs)?;
    let mut out = String::new();
    for (v, p) in r.points.iter().enumerate() {
        out.push_str(&format!("{v} {:.9} {:.9} {:.9}\n", p[0], p[1], p[2]));
    }
    fs::write(output, out)?;
    println!("wrote {}", output.display());
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Argument => 1,
        ErrorClass::Topology => 2,
        ErrorClass::Numerical => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Acm(a) => run_map("acm", a, cli.verbose),
        Command::Pacm(a) => run_map("pacm", a, cli.verbose),
        Command::Metrics { input, report } => run_metrics(input, report.as_deref()),
        Command::Register {
            source,
            target,
            output,
            pairs,
        } => run_register(source, target, output, pairs.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
