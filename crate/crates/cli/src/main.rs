use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use ice_cli::obj;
use ice_cli::{simplify, Demo, SimplifyOptions};

#[derive(Parser)]
#[command(name = "ice", version, about = "Intrinsic coarsening of triangle meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveArg {
    Poisson,
    Mg,
    Geodesic,
}

#[derive(Subcommand)]
enum Command {
    /// Coarsen a mesh and write the coarse mesh, map and prolongations.
    Simplify {
        input: PathBuf,
        /// Target vertex count.
        #[arg(long)]
        target: usize,
        /// Apply the target to every connected component.
        #[arg(long)]
        per_component: bool,
        #[arg(long, default_value_t = 1.0)]
        w_curvature: f64,
        #[arg(long, default_value_t = 0.0)]
        w_area: f64,
        /// One mass per vertex, one per line.
        #[arg(long)]
        masses: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        w_masses: f64,
        /// Vertex ids that must survive.
        #[arg(long)]
        fixed: Option<PathBuf>,
        #[arg(long, requires = "aniso_field")]
        aniso_tau: Option<f64>,
        /// Records `i x y z`.
        #[arg(long, requires = "aniso_tau")]
        aniso_field: Option<PathBuf>,
        /// Records `i j length` replacing Euclidean edge lengths.
        #[arg(long)]
        lengths: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out_prefix: PathBuf,
        /// Run a solver demo on the result and append it to the report.
        #[arg(long, value_enum)]
        solve: Option<SolveArg>,
        /// Accepted for compatibility; the pipeline uses no randomness.
        #[arg(long)]
        seedless: bool,
        /// Leave timings out of the report.
        #[arg(long)]
        deterministic_report: bool,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let Command::Simplify {
        input,
        target,
        per_component,
        w_curvature,
        w_area,
        masses,
        w_masses,
        fixed,
        aniso_tau,
        aniso_field,
        lengths,
        out_prefix,
        solve,
        seedless: _,
        deterministic_report,
    } = cli.command;
    let mesh = obj::parse_obj(&read(&input)?).with_context(|| format!("cannot parse {}", input.display()))?;
    let opts = SimplifyOptions {
        target,
        per_component,
        w_curvature,
        w_area,
        masses: masses.map(|p| read(&p).and_then(|t| Ok(obj::parse_values(&t)?))).transpose()?,
        w_masses,
        fixed: fixed.map(|p| read(&p).and_then(|t| Ok(obj::parse_ids(&t)?))).transpose()?.unwrap_or_default(),
        aniso_tau,
        aniso_field: aniso_field.map(|p| read(&p).and_then(|t| Ok(obj::parse_field(&t)?))).transpose()?,
        lengths: lengths.map(|p| read(&p).and_then(|t| Ok(obj::parse_lengths(&t)?))).transpose()?,
        solve: solve.map(|s| match s {
            SolveArg::Poisson => Demo::Poisson,
            SolveArg::Mg => Demo::Multigrid,
            SolveArg::Geodesic => Demo::Geodesic,
        }),
        deterministic_report,
    };
    let out = simplify(&mesh, &opts)?;
    for (suffix, text) in [
        (".coarse", &out.coarse),
        (".map", &out.map),
        (".pmat", &out.pmat),
        (".vec.pmat", &out.vec_pmat),
        (".viz", &out.viz),
        (".report", &out.report),
    ] {
        let path = with_suffix(&out_prefix, suffix);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}
