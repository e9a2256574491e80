//! `eqmps`: meshes, configured invariant runs, family ingestion and a self-test.
//!
//! Exit codes: 0 on success, 2 for a bad request (arguments, config, schema,
//! mesh mismatch), 3 when a numerical check fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eqmps::gcomplex::build_sphere_complex;
use eqmps::models::{model_group, SpinS};
use eqmps::pipeline::{ingest, run, selftest, MeshConfig, RunConfig};
use eqmps::{Error, Result, Tolerances};

#[derive(Parser)]
#[command(
    name = "eqmps",
    version,
    about = "Topological invariants of symmetric MPS families"
)]
struct Cli {
    /// Worker threads for per-simplex work; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a sphere mesh and print it as JSON.
    Mesh {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        refinements: usize,
        /// Comma-separated model symmetries whose parameter action is attached.
        #[arg(long, value_delimiter = ',')]
        group: Vec<String>,
        /// Spin used to generate the group.
        #[arg(long, default_value_t = 0.5)]
        spin: f64,
        /// Output file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a JSON config and print the report unless the config names a report file.
    Compute { config: PathBuf },
    /// Validate an MPS family file on a sphere mesh and print a summary.
    Ingest {
        path: PathBuf,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long)]
        refinements: usize,
    },
    /// Fast checks of known values; exits 3 if any fails.
    Selftest,
}

fn mesh_json(dim: usize, refinements: usize, group: &[String], spin: f64) -> Result<String> {
    let mut cx = build_sphere_complex(dim, refinements)?;
    if !group.is_empty() {
        if dim != 3 {
            return Err(Error::Config(
                "model symmetries act on the S3 parameter space; use --dim 3".into(),
            ));
        }
        let s =
            SpinS::new((2.0 * spin).round() as u32).map_err(|e| Error::Config(e.to_string()))?;
        let names: Vec<&str> = group.iter().map(String::as_str).collect();
        cx = cx.attach_group_data(&model_group(&names, s)?)?;
    }
    Ok(serde_json::to_string(&cx.export())? + "\n")
}

fn ingest_summary(path: &Path, dim: usize, refinements: usize) -> Result<String> {
    let fam = ingest(
        path,
        MeshConfig { dim, refinements },
        None,
        Tolerances::default(),
    )?;
    let cx = fam.complex().clone();
    let mut summary = serde_json::json!({
        "vertices": cx.n_vertices(),
        "max_bond_dim": fam.tensors().iter().map(|t| t.bond_dim()).max(),
    });
    if cx.dim() == 3 {
        summary["ddks"] = serde_json::to_value(fam.ddks(&cx.fundamental_class())?)?;
    }
    Ok(serde_json::to_string_pretty(&summary)? + "\n")
}

fn execute(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Mesh {
            dim,
            refinements,
            group,
            spin,
            out,
        } => {
            let text = mesh_json(dim, refinements, &group, spin)?;
            match out {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
        }
        Command::Compute { config } => {
            let cfg = RunConfig::load(&config)?;
            let report = run(&cfg)?;
            if cfg.output.report.is_none() {
                print!("{}", report.to_json()?);
            }
        }
        Command::Ingest {
            path,
            dim,
            refinements,
        } => print!("{}", ingest_summary(&path, dim, refinements)?),
        Command::Selftest => {
            let lines = selftest();
            for l in &lines {
                println!(
                    "{} {}: {}",
                    if l.passed { "PASS" } else { "FAIL" },
                    l.name,
                    l.detail
                );
            }
            return Ok(lines.iter().all(|l| l.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
