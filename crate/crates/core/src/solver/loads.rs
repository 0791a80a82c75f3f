//! Boundary conditions and the incremental load program.

use nalgebra::DVector;

use super::model::Model;
use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Homogeneous Dirichlet condition on a boundary set.
#[derive(Debug, Clone, PartialEq)]
pub struct Support {
    pub set: String,
    pub fix_x: bool,
    pub fix_y: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadKind {
    /// Traction increment [Pa] per step, fixed direction, on the current edge lengths.
    Traction(Vec2),
    /// Prescribed displacement increment [mm] per step, per component (None = free).
    Displacement([Option<f64>; 2]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Load {
    pub set: String,
    pub kind: LoadKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadProgram {
    pub supports: Vec<Support>,
    pub loads: Vec<Load>,
    pub n_steps: usize,
}

impl LoadProgram {
    pub fn validate(&self, model: &Model) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::InvalidInput(
                "load program needs at least one step".into(),
            ));
        }
        for s in &self.supports {
            model.mesh.set_nodes(&s.set)?;
        }
        for l in &self.loads {
            match &l.kind {
                LoadKind::Traction(t) => {
                    model.mesh.set_edges(&l.set)?;
                    if !(t.x.is_finite() && t.y.is_finite()) {
                        return Err(Error::InvalidInput(format!(
                            "traction on '{}' is not finite",
                            l.set
                        )));
                    }
                }
                LoadKind::Displacement(d) => {
                    model.mesh.set_nodes(&l.set)?;
                    if d.iter().flatten().any(|v| !v.is_finite()) {
                        return Err(Error::InvalidInput(format!(
                            "displacement on '{}' is not finite",
                            l.set
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Constrained dofs with their value per unit load factor. Enriched dofs of a
    /// constrained node are held at zero in the constrained components.
    pub fn constraints(&self, model: &Model) -> Result<Vec<(usize, f64)>> {
        let mut rate: Vec<Option<f64>> = vec![None; model.n_dofs()];
        let pin = |dof: usize, v: f64, rate: &mut [Option<f64>]| -> Result<()> {
            match rate[dof] {
                Some(old) if (old - v).abs() > 1e-14 * (1.0 + v.abs()) => Err(Error::InvalidInput(
                    format!("conflicting boundary conditions on dof {dof}"),
                )),
                _ => {
                    rate[dof] = Some(v);
                    Ok(())
                }
            }
        };
        let mut constrained_nodes = Vec::new();
        for s in &self.supports {
            for i in model.mesh.set_nodes(&s.set)? {
                let [dx, dy] = model.map.standard_dofs(i);
                if s.fix_x {
                    pin(dx, 0.0, &mut rate)?;
                    constrained_nodes.push((i, 0));
                }
                if s.fix_y {
                    pin(dy, 0.0, &mut rate)?;
                    constrained_nodes.push((i, 1));
                }
            }
        }
        for l in &self.loads {
            if let LoadKind::Displacement(d) = &l.kind {
                for i in model.mesh.set_nodes(&l.set)? {
                    let dofs = model.map.standard_dofs(i);
                    for c in 0..2 {
                        if let Some(v) = d[c] {
                            pin(dofs[c], v, &mut rate)?;
                            constrained_nodes.push((i, c));
                        }
                    }
                }
            }
        }
        for (i, c) in constrained_nodes {
            for d in model.map.node_dofs(i).skip(2 + c).step_by(2) {
                pin(d, 0.0, &mut rate)?;
            }
        }
        Ok(rate
            .into_iter()
            .enumerate()
            .filter_map(|(d, r)| r.map(|v| (d, v)))
            .collect())
    }

    /// External nodal forces per unit load factor, from the given current nodal positions.
    pub fn traction_rate(&self, model: &Model, current: &[Vec2]) -> Result<DVector<f64>> {
        let mut f = DVector::zeros(model.n_dofs());
        for l in &self.loads {
            if let LoadKind::Traction(t) = &l.kind {
                for [a, b] in model.mesh.set_edges(&l.set)? {
                    let len = (current[b] - current[a]).norm();
                    for i in [a, b] {
                        let [dx, dy] = model.map.standard_dofs(i);
                        f[dx] += 0.5 * len * t.x;
                        f[dy] += 0.5 * len * t.y;
                    }
                }
            }
        }
        Ok(f)
    }
}
