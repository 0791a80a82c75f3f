//! Displacement patch test with the linear field u = (2x, -y/2).

use nalgebra::{DMatrix, DVector, Matrix3};

use super::correction::evaluate_scheme;
use super::quadrature::{triangulate_quadrature, DEFAULT_ORDER};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::mesh::{generate_voronoi_mesh, Domain, PolyMesh, VoronoiOptions};
use crate::solver::sparse::{CsrMatrix, SkylineLdl};

/// Shear modulus and bulk modulus of the patch-test material.
pub const PATCH_MU: f64 = 1.0;
pub const PATCH_KAPPA: f64 = 1.0;

fn exact(x: &Vec2) -> Vec2 {
    Vec2::new(2.0 * x.x, -0.5 * x.y)
}

/// Plane-strain isotropic elasticity in Voigt form [xx, yy, xy] with engineering shear.
pub fn isotropic_voigt(lambda: f64, mu: f64) -> Matrix3<f64> {
    Matrix3::new(
        lambda + 2.0 * mu,
        lambda,
        0.0,
        lambda,
        lambda + 2.0 * mu,
        0.0,
        0.0,
        0.0,
        mu,
    )
}

/// Unit-square Voronoi mesh with `n` cells.
pub fn patch_mesh(n: usize, seed: u64) -> Result<PolyMesh> {
    let d = Domain::rectangle(Vec2::zeros(), Vec2::new(1.0, 1.0));
    generate_voronoi_mesh(&d, &VoronoiOptions::new(n, seed))
}

/// Solve the patch problem with every boundary node prescribed to the exact field.
/// Returns the relative L2 error and the relative H1-seminorm error.
pub fn run_patch_test(mesh: &PolyMesh, with_correction: bool) -> Result<(f64, f64)> {
    // kappa is the bulk modulus: lambda = kappa - 2 mu / 3
    let d = isotropic_voigt(PATCH_KAPPA - 2.0 * PATCH_MU / 3.0, PATCH_MU);
    let ndof = 2 * mesh.num_nodes();
    let blocks: Vec<Vec<usize>> = mesh
        .elements
        .iter()
        .map(|r| r.iter().flat_map(|&i| [2 * i, 2 * i + 1]).collect())
        .collect();
    let mut k = CsrMatrix::from_blocks(ndof, blocks.iter().map(|b| b.as_slice()));
    let mut data = Vec::with_capacity(mesh.num_elements());
    for (e, dofs) in blocks.iter().enumerate() {
        let ring = mesh.ring(e);
        let q = triangulate_quadrature(&ring, DEFAULT_ORDER)?;
        let s = evaluate_scheme(&ring, &q, with_correction)?;
        let n = ring.len();
        let mut ke = DMatrix::zeros(2 * n, 2 * n);
        for (w, ev) in q.weights.iter().zip(&s) {
            let mut b = DMatrix::zeros(3, 2 * n);
            for (a, g) in ev.grads.iter().enumerate() {
                b[(0, 2 * a)] = g.x;
                b[(1, 2 * a + 1)] = g.y;
                b[(2, 2 * a)] = g.y;
                b[(2, 2 * a + 1)] = g.x;
            }
            let db = DMatrix::from_fn(3, 2 * n, |r, c| (0..3).map(|m| d[(r, m)] * b[(m, c)]).sum());
            ke += b.transpose() * db * *w;
        }
        k.add_block(dofs, &ke);
        data.push((q, s));
    }

    let mut fixed = vec![false; ndof];
    let mut u = DVector::zeros(ndof);
    for i in mesh.boundary_edges().iter().flat_map(|e| e.iter().copied()) {
        let ue = exact(&mesh.nodes[i]);
        fixed[2 * i] = true;
        fixed[2 * i + 1] = true;
        u[2 * i] = ue.x;
        u[2 * i + 1] = ue.y;
    }
    let free: Vec<usize> = (0..ndof).filter(|&i| !fixed[i]).collect();
    if !free.is_empty() {
        let r = k.mul_vec(&u);
        let rhs = DVector::from_iterator(free.len(), free.iter().map(|&i| -r[i]));
        let ldl = SkylineLdl::factor(&k, &free).map_err(|e| match e {
            Error::Singular(m) => Error::Singular(format!("patch test stiffness: {m}")),
            other => other,
        })?;
        let x = ldl.solve(&rhs);
        for (k, &i) in free.iter().enumerate() {
            u[i] = x[k];
        }
    }

    let (mut e0, mut n0, mut e1, mut n1) = (0.0, 0.0, 0.0, 0.0);
    let grad_exact = nalgebra::Matrix2::new(2.0, 0.0, 0.0, -0.5);
    for (e, (q, s)) in data.iter().enumerate() {
        let ring = &mesh.elements[e];
        for ((x, w), ev) in q.points.iter().zip(&q.weights).zip(s) {
            let mut uh = Vec2::zeros();
            let mut gh = nalgebra::Matrix2::zeros();
            for (a, &i) in ring.iter().enumerate() {
                let ua = Vec2::new(u[2 * i], u[2 * i + 1]);
                uh += ua * ev.values[a];
                gh += ua * ev.grads[a].transpose();
            }
            let ue = exact(x);
            e0 += w * (uh - ue).norm_squared();
            n0 += w * ue.norm_squared();
            e1 += w * (gh - grad_exact).norm_squared();
            n1 += w * grad_exact.norm_squared();
        }
    }
    Ok(((e0 / n0).sqrt(), (e1 / n1).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry;

    #[test]
    fn single_square_is_exact_either_way() {
        let sq = geometry::rectangle(Vec2::zeros(), Vec2::new(1.0, 1.0));
        let m = PolyMesh {
            nodes: sq,
            elements: vec![vec![0, 1, 2, 3]],
            ..Default::default()
        };
        for corr in [false, true] {
            let (l2, h1) = run_patch_test(&m, corr).unwrap();
            assert!(l2 < 1e-15 && h1 < 1e-14, "{l2} {h1}");
        }
    }
}
