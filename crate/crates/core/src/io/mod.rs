//! Result files: VTK snapshots, CSV curves and the JSON run summary.

pub mod curves;
pub mod vtk;

use serde::Serialize;

/// Written as `summary.json` at the end of a run (also after a solver abort).
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub status: String,
    pub message: Option<String>,
    pub elements: usize,
    pub nodes: usize,
    pub dofs: usize,
    pub steps_completed: usize,
    pub steps_requested: usize,
    pub total_iterations: usize,
    pub final_residual: Option<f64>,
    pub final_j: Option<f64>,
    pub final_k: Option<[f64; 2]>,
    pub j_radius: Option<f64>,
    pub reduced_domain: bool,
    pub wall_seconds: f64,
}
