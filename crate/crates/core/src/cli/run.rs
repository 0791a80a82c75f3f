//! Driving a configured simulation: model set-up, load stepping, fracture
//! post-processing per step, and the artifact writers.

use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::fracture::{
    crack_opening, j_integral, stress_intensity_factors, tearing_factors, JDomain, TearingFactors,
};
use crate::geometry;
use crate::io::curves::{CurveWriter, J_HEADER, SIF_HEADER, SOLVER_HEADER, TEARING_HEADER};
use crate::io::{vtk, RunSummary};
use crate::mesh::{self, PolyMesh};
use crate::solver::{newton_solve, Model, SolverState};

/// Crack-face samples used for the opening (Yeoh's ellipse semi-axis).
const OPENING_SAMPLES: usize = 40;

/// Post-processed quantities of one converged step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub step: usize,
    /// Accumulated load measure (traction [Pa] or displacement [mm]).
    pub load: f64,
    pub iterations: usize,
    pub j: Option<f64>,
    pub k: Option<(f64, f64)>,
    pub tearing: Option<TearingFactors>,
}

pub struct Simulation {
    pub config: RunConfig,
    pub model: Model,
    pub domain: Option<JDomain>,
    /// Cell size behind the J radius.
    pub cell_size: Option<f64>,
}

impl Simulation {
    pub fn new(config: RunConfig) -> Result<Self> {
        let mesh = config.build_mesh()?;
        Self::with_mesh(config, mesh)
    }

    pub fn with_mesh(config: RunConfig, mesh: PolyMesh) -> Result<Self> {
        let crack = config.crack()?;
        let model = Model::new(
            mesh,
            crack.as_ref(),
            config.material_model()?,
            config.basis_options(),
        )?;
        config.load_program().validate(&model)?;
        let cell_size = match (&crack, model.map.tip_element) {
            (Some(_), Some(te)) => Some(
                config
                    .fracture
                    .cell_size
                    .or(config.mesh.refinement.map(|r| r.cell_size))
                    .unwrap_or_else(|| {
                        geometry::diameter(&model.mesh.ring(te)) / std::f64::consts::SQRT_2
                    }),
            ),
            _ => None,
        };
        let domain = cell_size
            .map(|h| JDomain::new(&model, config.fracture.radius_factor * h))
            .transpose()?;
        Ok(Simulation {
            config,
            model,
            domain,
            cell_size,
        })
    }

    /// J domain of `factor` cell sizes around the tip.
    pub fn domain_with_factor(&self, factor: f64) -> Result<JDomain> {
        let h = self
            .cell_size
            .ok_or_else(|| Error::InvalidInput("no crack in the model".into()))?;
        JDomain::new(&self.model, factor * h)
    }

    pub fn post(&self, state: &SolverState) -> Result<StepResult> {
        let u = &state.u;
        let (j, k) = match &self.domain {
            Some(d) => (
                Some(j_integral(&self.model, u, d)?),
                if self.config.fracture.sif {
                    Some(stress_intensity_factors(&self.model, u, d)?)
                } else {
                    None
                },
            ),
            None => (None, None),
        };
        let tearing = match &self.config.fracture.tearing {
            Some(t) => {
                let lambda = 1.0 + t.stretch_increment * state.step as f64;
                let b = 0.5 * crack_opening(&self.model, u, OPENING_SAMPLES)?;
                Some(tearing_factors(
                    lambda,
                    t.extension.into(),
                    &self.model.material,
                    t.half_length,
                    Some(b),
                )?)
            }
            None => None,
        };
        Ok(StepResult {
            step: state.step,
            load: self.config.load_per_step() * state.step as f64,
            iterations: state.steps.last().map_or(0, |s| s.iterations),
            j,
            k,
            tearing,
        })
    }

    /// Solve the load program; `on_step` sees every converged step. A solver failure
    /// is returned alongside the steps that did converge.
    pub fn solve(
        &self,
        mut on_step: impl FnMut(&SolverState, &StepResult) -> Result<()>,
    ) -> (Vec<StepResult>, Result<SolverState>) {
        let mut results = Vec::new();
        let out = newton_solve(
            &self.model,
            &self.config.load_program(),
            &self.config.solver_options(),
            |s| {
                let r = self.post(s)?;
                on_step(s, &r)?;
                results.push(r);
                Ok(true)
            },
        );
        (results, out)
    }
}

/// Output root: `POLYXFEM_OUTPUT_ROOT`, else `./output`.
pub fn output_root() -> PathBuf {
    std::env::var_os("POLYXFEM_OUTPUT_ROOT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("output"))
}

/// Is this a solver failure (exit code 2) rather than bad input (exit code 1)?
pub fn is_solver_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::Diverged { .. } | Error::Singular(_) | Error::Inversion { .. }
    )
}

pub struct RunReport {
    pub dir: PathBuf,
    pub summary: RunSummary,
    pub steps: Vec<StepResult>,
    /// Set when the solver aborted; the converged steps are still on disk.
    pub failure: Option<Error>,
}

/// Write the mesh in the native text format and as VTK.
pub fn write_mesh_files(mesh: &PolyMesh, dir: &Path, title: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    mesh::io::write(mesh, &dir.join("mesh.txt"))?;
    vtk::write_mesh(&dir.join("mesh.vtk"), mesh, title)
}

/// Full run with artifacts under `dir`.
pub fn run_to_dir(config: RunConfig, dir: &Path) -> Result<RunReport> {
    let t0 = Instant::now();
    std::fs::create_dir_all(dir)?;
    let mesh = config.build_mesh()?;
    write_mesh_files(&mesh, dir, &config.name)?;
    std::fs::write(dir.join("config.toml"), config.to_toml())?;
    let sim = Simulation::with_mesh(config, mesh)?;
    let cfg = &sim.config;
    let has_crack = sim.domain.is_some();
    let mut curves = if cfg.output.csv {
        Some((
            CurveWriter::create(&dir.join("solver.csv"), SOLVER_HEADER)?,
            if has_crack {
                Some(CurveWriter::create(&dir.join("j.csv"), J_HEADER)?)
            } else {
                None
            },
            if has_crack && cfg.fracture.sif {
                Some(CurveWriter::create(&dir.join("sif.csv"), SIF_HEADER)?)
            } else {
                None
            },
            if cfg.fracture.tearing.is_some() {
                Some(CurveWriter::create(
                    &dir.join("tearing.csv"),
                    TEARING_HEADER,
                )?)
            } else {
                None
            },
        ))
    } else {
        None
    };
    let n_steps = cfg.loading.n_steps;
    let (steps, out) = sim.solve(|state, r| {
        if let Some((solver, j, sif, tear)) = curves.as_mut() {
            let s = state.steps.last().unwrap();
            solver.row(&[
                Some(s.step as f64),
                Some(s.load_factor),
                Some(s.iterations as f64),
                Some(s.bisections as f64),
                Some(s.residual),
                Some(s.external_norm),
                Some(s.reaction_norm),
            ])?;
            if let Some(w) = j {
                w.row(&[Some(r.step as f64), Some(r.load), r.j])?;
            }
            if let (Some(w), Some((k1, k2))) = (sif, r.k) {
                w.row(&[Some(r.step as f64), Some(k1), Some(k2)])?;
            }
            if let (Some(w), Some(t)) = (tear, &r.tearing) {
                w.row(&[
                    Some(t.lambda),
                    Some(t.k_lake),
                    Some(t.k_lindley),
                    t.k_yeoh,
                    r.j,
                ])?;
            }
        }
        if cfg.output.vtk && (state.step % cfg.output.vtk_every == 0 || state.step == n_steps) {
            let path = dir.join(format!("step_{:04}.vtk", state.step));
            vtk::write_solution(
                &path,
                &sim.model,
                &state.u,
                &format!("{} step {}", cfg.name, state.step),
            )?;
        }
        log::info!(
            "step {} done: J {} K {}",
            r.step,
            r.j.map_or("-".into(), |j| format!("{j:.5e}")),
            r.k.map_or("-".into(), |(a, b)| format!("({a:.5e}, {b:.5e})"))
        );
        Ok(())
    });
    let (state, failure) = match out {
        Ok(s) => (Some(s), None),
        Err(e) => (None, Some(e)),
    };
    let last = steps.last();
    let summary = RunSummary {
        name: cfg.name.clone(),
        status: if failure.is_none() {
            "ok".into()
        } else {
            "failed".into()
        },
        message: failure.as_ref().map(|e| e.to_string()),
        elements: sim.model.mesh.num_elements(),
        nodes: sim.model.mesh.num_nodes(),
        dofs: sim.model.n_dofs(),
        steps_completed: steps.len(),
        steps_requested: n_steps,
        total_iterations: steps.iter().map(|s| s.iterations).sum(),
        final_residual: state.as_ref().map(|s| s.residual_norm),
        final_j: last.and_then(|s| s.j),
        final_k: last.and_then(|s| s.k).map(|(a, b)| [a, b]),
        j_radius: sim.domain.as_ref().map(|d| d.radius),
        reduced_domain: sim.domain.as_ref().is_some_and(|d| d.reduced),
        wall_seconds: t0.elapsed().as_secs_f64(),
    };
    let json =
        serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    std::fs::write(dir.join("summary.json"), json)?;
    Ok(RunReport {
        dir: dir.to_path_buf(),
        summary,
        steps,
        failure,
    })
}
