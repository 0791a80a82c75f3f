//! Discrete model: mesh, enrichment layout, material and precomputed element
//! integration data, with assembly of internal force and tangent stiffness.
//!
//! Integration runs over the undeformed element with dv = J dV; the spatial
//! gradients F^-T grad_X psi make this identical to integrating over the
//! current configuration.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};

use super::sparse::CsrMatrix;
use crate::enrichment::{
    build_b_g, classify, deformation_gradient, gather, integrate_element, spatial_gradients,
    BasisOptions, CrackGeometry, ElementIntegration, EnrichmentMap,
};
use crate::error::{Error, Result};
use crate::geometry::{self, Vec2};
use crate::material::{MaterialModel, StressTangent};
use crate::mesh::PolyMesh;

#[derive(Debug, Clone)]
pub struct Model {
    pub mesh: PolyMesh,
    pub map: EnrichmentMap,
    pub material: MaterialModel,
    pub elements: Vec<ElementIntegration>,
    pub options: BasisOptions,
}

/// Kinematic and constitutive state at one quadrature point.
#[derive(Debug, Clone)]
pub struct PointState {
    pub f: Matrix2<f64>,
    pub response: StressTangent,
}

impl Model {
    pub fn new(
        mesh: PolyMesh,
        crack: Option<&CrackGeometry>,
        material: MaterialModel,
        options: BasisOptions,
    ) -> Result<Self> {
        mesh.validate()?;
        material.validate()?;
        let map = match crack {
            Some(c) => classify(&mesh, c)?,
            None => EnrichmentMap::standard(&mesh),
        };
        let elements = (0..mesh.num_elements())
            .map(|e| integrate_element(&mesh, &map, e, &options))
            .collect::<Result<Vec<_>>>()?;
        Ok(Model {
            mesh,
            map,
            material,
            elements,
            options,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.map.n_dofs
    }

    /// Empty matrix with the assembly pattern.
    pub fn pattern(&self) -> CsrMatrix {
        CsrMatrix::from_blocks(
            self.n_dofs(),
            self.elements.iter().map(|e| e.ctx.dofs.as_slice()),
        )
    }

    /// Deformation gradient and material response at quadrature point `q` of element `e`.
    pub fn point_state(&self, e: usize, q: usize, u_elem: &[f64]) -> Result<PointState> {
        let f = deformation_gradient(&self.elements[e].points[q].eval.dpsi, u_elem);
        let response = self.material.evaluate(&f).map_err(|err| match err {
            Error::Inversion { det, .. } => Error::Inversion { element: e, det },
            other => other,
        })?;
        Ok(PointState { f, response })
    }

    /// Element internal force and, when requested, tangent stiffness.
    pub fn element_response(
        &self,
        e: usize,
        u_elem: &[f64],
        with_tangent: bool,
    ) -> Result<(DVector<f64>, Option<DMatrix<f64>>)> {
        let el = &self.elements[e];
        let nd = el.ctx.dofs.len();
        let mut fe = DVector::zeros(nd);
        let mut ke = with_tangent.then(|| DMatrix::zeros(nd, nd));
        let linear = self.material.is_linear();
        for (q, qp) in el.points.iter().enumerate() {
            let ps = self.point_state(e, q, u_elem)?;
            let r = &ps.response;
            let grads = if linear {
                qp.eval.dpsi.clone()
            } else {
                spatial_gradients(&ps.f, &qp.eval.dpsi)?
            };
            let dv = qp.weight * r.j_det;
            let (b, g) = build_b_g(&grads);
            let sv = nalgebra::Vector3::new(r.sigma[(0, 0)], r.sigma[(1, 1)], r.sigma[(0, 1)]);
            fe += b.tr_mul(&DVector::from_column_slice(sv.as_slice())) * dv;
            if let Some(ke) = ke.as_mut() {
                let c = DMatrix::from_column_slice(3, 3, r.ce.as_slice());
                *ke += b.tr_mul(&(c * &b)) * dv;
                if !linear {
                    let s = r.sigma;
                    #[rustfmt::skip]
                    let m = Matrix4::new(
                        s[(0, 0)], s[(0, 1)], 0.0, 0.0,
                        s[(1, 0)], s[(1, 1)], 0.0, 0.0,
                        0.0, 0.0, s[(0, 0)], s[(0, 1)],
                        0.0, 0.0, s[(1, 0)], s[(1, 1)],
                    );
                    let m = DMatrix::from_column_slice(4, 4, m.as_slice());
                    *ke += g.tr_mul(&(m * &g)) * dv;
                }
            }
        }
        Ok((fe, ke))
    }

    pub fn internal_force(&self, u: &DVector<f64>) -> Result<DVector<f64>> {
        let mut f = DVector::zeros(self.n_dofs());
        for (e, el) in self.elements.iter().enumerate() {
            let (fe, _) = self.element_response(e, &gather(&el.ctx.dofs, u), false)?;
            for (a, &d) in el.ctx.dofs.iter().enumerate() {
                f[d] += fe[a];
            }
        }
        Ok(f)
    }

    /// Internal force and tangent, assembled into `k` (which must carry [`Model::pattern`]).
    pub fn assemble(&self, u: &DVector<f64>, k: &mut CsrMatrix) -> Result<DVector<f64>> {
        k.clear();
        let mut f = DVector::zeros(self.n_dofs());
        for (e, el) in self.elements.iter().enumerate() {
            let (fe, ke) = self.element_response(e, &gather(&el.ctx.dofs, u), true)?;
            for (a, &d) in el.ctx.dofs.iter().enumerate() {
                f[d] += fe[a];
            }
            k.add_block(&el.ctx.dofs, &ke.unwrap());
        }
        Ok(f)
    }

    pub fn tangent(&self, u: &DVector<f64>) -> Result<CsrMatrix> {
        let mut k = self.pattern();
        self.assemble(u, &mut k)?;
        Ok(k)
    }

    /// Nodal displacements (standard dofs; enrichment vanishes at nodes).
    pub fn nodal_displacements(&self, u: &DVector<f64>) -> Vec<Vec2> {
        (0..self.mesh.num_nodes())
            .map(|i| {
                let [a, b] = self.map.standard_dofs(i);
                Vec2::new(u[a], u[b])
            })
            .collect()
    }

    pub fn current_nodes(&self, u: &DVector<f64>) -> Vec<Vec2> {
        self.nodal_displacements(u)
            .iter()
            .zip(&self.mesh.nodes)
            .map(|(d, x)| x + d)
            .collect()
    }

    /// Element containing undeformed point `x`.
    pub fn locate(&self, x: &Vec2) -> Option<usize> {
        (0..self.mesh.num_elements()).find(|&e| geometry::point_in_polygon(x, &self.mesh.ring(e)))
    }

    /// Displacement at an undeformed point, with the crack side optionally forced.
    pub fn displacement_at(&self, x: &Vec2, u: &DVector<f64>, side: Option<f64>) -> Result<Vec2> {
        let e = self.locate(x).ok_or(Error::OutsidePolygon(x.x, x.y))?;
        let ctx = &self.elements[e].ctx;
        ctx.displacement(x, &gather(&ctx.dofs, u), side)
    }

    /// Volume-averaged Cauchy stress per element.
    pub fn element_stresses(&self, u: &DVector<f64>) -> Result<Vec<Matrix2<f64>>> {
        self.elements
            .iter()
            .enumerate()
            .map(|(e, el)| {
                let ue = gather(&el.ctx.dofs, u);
                let (mut s, mut w) = (Matrix2::zeros(), 0.0);
                for q in 0..el.points.len() {
                    let ps = self.point_state(e, q, &ue)?;
                    s += ps.response.sigma * el.points[q].weight;
                    w += el.points[q].weight;
                }
                Ok(s / w)
            })
            .collect()
    }
}

pub fn von_mises(s: &Matrix2<f64>) -> f64 {
    (s[(0, 0)].powi(2) - s[(0, 0)] * s[(1, 1)] + s[(1, 1)].powi(2) + 3.0 * s[(0, 1)].powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::lame_from_engineering;
    use crate::mesh::{structured_quad_mesh, Domain};

    fn square_model(material: MaterialModel) -> Model {
        let m = structured_quad_mesh(&Domain::rectangle(Vec2::zeros(), Vec2::new(1.0, 1.0)), 1, 1)
            .unwrap();
        Model::new(m, None, material, BasisOptions::default()).unwrap()
    }

    #[test]
    fn zero_displacement_is_stress_free() {
        let (l, m) = lame_from_engineering(50e3, 0.3).unwrap();
        let model = square_model(MaterialModel::NeoHookeanCompressible { lambda: l, mu: m });
        let f = model
            .internal_force(&DVector::zeros(model.n_dofs()))
            .unwrap();
        assert!(f.norm() < 1e-12);
    }

    #[test]
    fn homogeneous_stretch_matches_traction_resultant() {
        let (l, m) = lame_from_engineering(50e3, 0.3).unwrap();
        let mat = MaterialModel::NeoHookeanCompressible { lambda: l, mu: m };
        let model = square_model(mat);
        let mut u = DVector::zeros(model.n_dofs());
        for (i, x) in model.mesh.nodes.iter().enumerate() {
            u[2 * i] = 0.1 * x.x;
        }
        let f = model.internal_force(&u).unwrap();
        let sigma = mat
            .evaluate(&Matrix2::new(1.1, 0.0, 0.0, 1.0))
            .unwrap()
            .sigma;
        // right edge (current length 1) carries sigma_xx, split between two nodes
        let right: f64 = model
            .mesh
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, x)| x.x > 0.5)
            .map(|(i, _)| f[2 * i])
            .sum();
        assert!(
            (right / sigma[(0, 0)] - 1.0).abs() < 1e-8,
            "{right} {}",
            sigma[(0, 0)]
        );
    }

    #[test]
    fn rigid_rotation_has_no_internal_force() {
        let model = square_model(MaterialModel::NeoHookeanIncompressiblePS {
            mu: 1.0,
            thickness: 1.0,
        });
        let r = nalgebra::Rotation2::new(0.7);
        let mut u = DVector::zeros(model.n_dofs());
        for (i, x) in model.mesh.nodes.iter().enumerate() {
            let d = r * x - x;
            u[2 * i] = d.x;
            u[2 * i + 1] = d.y;
        }
        assert!(model.internal_force(&u).unwrap().norm() < 1e-8);
    }
}
