//! Append-as-you-go CSV curves, flushed after every row so that an aborted run
//! still leaves the converged part on disk.

use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn fmt(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e9 {
        format!("{x}")
    } else {
        format!("{x:.10e}")
    }
}

pub struct CurveWriter {
    inner: csv::Writer<File>,
    width: usize,
}

impl CurveWriter {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let mut inner = csv::Writer::from_path(path).map_err(csv_err)?;
        inner.write_record(header).map_err(csv_err)?;
        inner.flush()?;
        Ok(CurveWriter {
            inner,
            width: header.len(),
        })
    }

    /// Missing values are written as empty fields, whole numbers without exponent.
    pub fn row(&mut self, values: &[Option<f64>]) -> Result<()> {
        debug_assert_eq!(values.len(), self.width);
        let rec: Vec<String> = values
            .iter()
            .map(|v| v.map(fmt).unwrap_or_default())
            .collect();
        self.inner.write_record(&rec).map_err(csv_err)?;
        self.inner.flush()?;
        Ok(())
    }
}

pub const J_HEADER: &[&str] = &["step", "load", "J"];
pub const SIF_HEADER: &[&str] = &["step", "K_I", "K_II"];
pub const TEARING_HEADER: &[&str] = &["lambda", "k_lake", "k_lindley", "k_yeoh", "J"];
pub const SOLVER_HEADER: &[&str] = &[
    "step",
    "load_factor",
    "iterations",
    "bisections",
    "residual",
    "external_norm",
    "reaction_norm",
];
pub const PATCH_HEADER: &[&str] = &["elements", "l2_with", "h1_with", "l2_without", "h1_without"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_flushed() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("j.csv");
        let mut w = CurveWriter::create(&p, J_HEADER).unwrap();
        w.row(&[Some(1.0), Some(5000.0), None]).unwrap();
        w.row(&[Some(2.0), Some(10000.0), Some(0.125)]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(
            text.lines().collect::<Vec<_>>(),
            vec!["step,load,J", "1,5000,", "2,10000,1.2500000000e-1"]
        );
    }
}
