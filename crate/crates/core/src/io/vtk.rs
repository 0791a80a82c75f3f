//! Legacy ASCII VTK output (POLYDATA with POLYGONS cells).

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DVector, Matrix2};

use crate::error::Result;
use crate::geometry::Vec2;
use crate::mesh::PolyMesh;
use crate::solver::{von_mises, Model};

/// Cell-wise field written as a scalar array.
pub struct CellField<'a> {
    pub name: &'a str,
    pub values: &'a [f64],
}

/// Serialize `mesh` at nodal positions `points` with cell scalars and an optional
/// point vector field.
pub fn to_string(
    mesh: &PolyMesh,
    points: &[Vec2],
    cells: &[CellField],
    displacement: Option<&[Vec2]>,
    title: &str,
) -> String {
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    // the title line must be a single line of at most 256 characters
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    let _ = writeln!(s, "{title}");
    s.push_str("ASCII\nDATASET POLYDATA\n");
    let _ = writeln!(s, "POINTS {} double", points.len());
    for p in points {
        let _ = writeln!(s, "{:.12e} {:.12e} 0", p.x, p.y);
    }
    let size: usize = mesh.elements.iter().map(|r| r.len() + 1).sum();
    let _ = writeln!(s, "POLYGONS {} {}", mesh.num_elements(), size);
    for r in &mesh.elements {
        let _ = write!(s, "{}", r.len());
        for i in r {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
    }
    if !cells.is_empty() {
        let _ = writeln!(s, "CELL_DATA {}", mesh.num_elements());
        for f in cells {
            let _ = writeln!(s, "SCALARS {} double 1\nLOOKUP_TABLE default", f.name);
            for v in f.values {
                let _ = writeln!(s, "{v:.12e}");
            }
        }
    }
    if let Some(d) = displacement {
        let _ = writeln!(
            s,
            "POINT_DATA {}\nVECTORS displacement double",
            points.len()
        );
        for v in d {
            let _ = writeln!(s, "{:.12e} {:.12e} 0", v.x, v.y);
        }
    }
    s
}

/// Deformed mesh with element-averaged Cauchy stress components and von Mises stress.
pub fn solution_string(model: &Model, u: &DVector<f64>, title: &str) -> Result<String> {
    let sig: Vec<Matrix2<f64>> = model.element_stresses(u)?;
    let sxx: Vec<f64> = sig.iter().map(|s| s[(0, 0)]).collect();
    let syy: Vec<f64> = sig.iter().map(|s| s[(1, 1)]).collect();
    let sxy: Vec<f64> = sig.iter().map(|s| s[(0, 1)]).collect();
    let vm: Vec<f64> = sig.iter().map(von_mises).collect();
    let cells = [
        CellField {
            name: "sigma_xx",
            values: &sxx,
        },
        CellField {
            name: "sigma_yy",
            values: &syy,
        },
        CellField {
            name: "sigma_xy",
            values: &sxy,
        },
        CellField {
            name: "von_mises",
            values: &vm,
        },
    ];
    let d = model.nodal_displacements(u);
    Ok(to_string(
        &model.mesh,
        &model.current_nodes(u),
        &cells,
        Some(&d),
        title,
    ))
}

pub fn write_solution(path: &Path, model: &Model, u: &DVector<f64>, title: &str) -> Result<()> {
    std::fs::write(path, solution_string(model, u, title)?)?;
    Ok(())
}

pub fn write_mesh(path: &Path, mesh: &PolyMesh, title: &str) -> Result<()> {
    std::fs::write(path, to_string(mesh, &mesh.nodes, &[], None, title))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_counts() {
        let m = PolyMesh {
            nodes: vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(0.0, 1.0),
                Vec2::new(2.0, 0.5),
            ],
            elements: vec![vec![0, 1, 2, 3], vec![1, 4, 2]],
            ..Default::default()
        };
        let s = to_string(
            &m,
            &m.nodes,
            &[CellField {
                name: "a",
                values: &[1.0, 2.0],
            }],
            None,
            "t",
        );
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(
            &lines[..5],
            &[
                "# vtk DataFile Version 3.0",
                "t",
                "ASCII",
                "DATASET POLYDATA",
                "POINTS 5 double"
            ]
        );
        assert_eq!(lines[10], "POLYGONS 2 9");
        assert_eq!(lines[11], "4 0 1 2 3");
        assert_eq!(lines[13], "CELL_DATA 2");
    }
}
