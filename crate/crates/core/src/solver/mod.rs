//! Assembly, boundary conditions and the incremental Newton-Raphson solver.

mod loads;
mod model;
mod newton;
pub mod sparse;

pub use loads::{Load, LoadKind, LoadProgram, Support};
pub use model::{von_mises, Model, PointState};
pub use newton::{newton_solve, IterationLog, SolverOptions, SolverState, StepRecord};
