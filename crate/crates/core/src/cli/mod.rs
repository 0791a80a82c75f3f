//! Run configuration, simulation driver and bundled benchmarks behind the command line.

pub mod bench;
pub mod config;
pub mod run;

pub use config::RunConfig;
pub use run::{is_solver_failure, output_root, run_to_dir, RunReport, Simulation, StepResult};
