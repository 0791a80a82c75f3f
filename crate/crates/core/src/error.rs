use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point ({0}, {1}) lies outside the polygon")]
    OutsidePolygon(f64, f64),
    #[error("element {element} inverted (det F = {det:e})")]
    Inversion { element: usize, det: f64 },
    #[error("singular stiffness matrix: {0}")]
    Singular(String),
    #[error("load step {step} failed to converge: {reason}")]
    Diverged { step: usize, reason: String },
    #[error("{path}:{line}: {msg}")]
    Config {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
