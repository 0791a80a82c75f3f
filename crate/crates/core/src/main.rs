use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polyxfem::cli::bench::{self, PATCH_SEED};
use polyxfem::cli::{is_solver_failure, output_root, run_to_dir, RunConfig};
use polyxfem::io::curves::{CurveWriter, PATCH_HEADER};
use polyxfem::Error;

/// Polygonal extended finite elements for large-deformation fracture.
///
/// Artifacts go to `$POLYXFEM_OUTPUT_ROOT` (default `./output`).
/// Exit codes: 0 ok, 1 invalid input or failed gate, 2 solver failure.
#[derive(Parser)]
#[command(name = "polyxfem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a configured problem and write mesh, VTK fields, CSV curves and a JSON summary.
    Run { config: PathBuf },
    /// Build and write the mesh of a configuration without solving.
    MeshOnly { config: PathBuf },
    /// Polynomial patch test on Voronoi meshes of the given sizes.
    PatchTest {
        #[arg(long, value_delimiter = ',', default_values_t = [10, 50, 250])]
        elems: Vec<usize>,
        #[arg(long, default_value_t = PATCH_SEED)]
        seed: u64,
    },
    /// Run the bundled benchmark suite and print a pass/fail table.
    Bench {
        /// Disable the gradient correction in the patch-test gate.
        #[arg(long)]
        no_correction: bool,
    },
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if is_solver_failure(e) { 2 } else { 1 })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run { config } => {
            let cfg = match RunConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let dir = output_root().join(&cfg.name);
            match run_to_dir(cfg, &dir) {
                Ok(report) => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&report.summary).unwrap_or_default()
                    );
                    match report.failure {
                        Some(e) => {
                            eprintln!("partial results in {}", dir.display());
                            fail(&e)
                        }
                        None => ExitCode::SUCCESS,
                    }
                }
                Err(e) => fail(&e),
            }
        }
        Command::MeshOnly { config } => {
            let out = RunConfig::load(&config).and_then(|cfg| {
                let mesh = cfg.build_mesh()?;
                let dir = output_root().join(&cfg.name);
                polyxfem::cli::run::write_mesh_files(&mesh, &dir, &cfg.name)?;
                println!(
                    "{} elements, {} nodes -> {}",
                    mesh.num_elements(),
                    mesh.num_nodes(),
                    dir.display()
                );
                Ok(())
            });
            out.map_or_else(|e| fail(&e), |_| ExitCode::SUCCESS)
        }
        Command::PatchTest { elems, seed } => {
            let out = bench::patch_table(&elems, seed).and_then(|rows| {
                let root = output_root();
                std::fs::create_dir_all(&root)?;
                let path = root.join("patch_test.csv");
                let mut w = CurveWriter::create(&path, PATCH_HEADER)?;
                println!(
                    "{:>9} {:>12} {:>12} {:>12} {:>12}",
                    "elements", "L2 with", "H1 with", "L2 without", "H1 without"
                );
                for (n, a, b, c, d) in rows {
                    w.row(&[Some(n as f64), Some(a), Some(b), Some(c), Some(d)])?;
                    println!("{n:>9} {a:>12.3e} {b:>12.3e} {c:>12.3e} {d:>12.3e}");
                }
                println!("-> {}", path.display());
                Ok(())
            });
            out.map_or_else(|e| fail(&e), |_| ExitCode::SUCCESS)
        }
        Command::Bench { no_correction } => {
            let gates = bench::suite(!no_correction);
            for g in &gates {
                println!("{}", g.line());
            }
            let failed = gates.iter().filter(|g| !g.pass).count();
            println!("{} of {} gates passed", gates.len() - failed, gates.len());
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
