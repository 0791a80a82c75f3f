//! Enriched approximation on one element: shifted Heaviside and ramped branch
//! functions evaluated at undeformed points, element quadrature, Jacobians and
//! the B / G operators.

use nalgebra::{DMatrix, DVector, Matrix2};

use super::classify::{split_polygon, ElementKind, EnrichmentMap};
use super::crack::CrackGeometry;
use crate::basis::{
    collapsed_rule, map_rule, mean_value_grad, triangle_rule, triangulate, QuadratureScheme,
    ShapeEval, DEFAULT_ORDER, ENRICHED_ORDER,
};
use crate::error::{Error, Result};
use crate::geometry::{self, Vec2};
use crate::mesh::PolyMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    Standard,
    Heaviside,
    Tip,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisOptions {
    pub correct_gradients: bool,
    pub standard_order: usize,
    pub enriched_order: usize,
}

impl Default for BasisOptions {
    fn default() -> Self {
        BasisOptions {
            correct_gradients: true,
            standard_order: DEFAULT_ORDER,
            enriched_order: ENRICHED_ORDER,
        }
    }
}

/// Approximation functions of one element at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionEval {
    /// Standard shape values / gradients per ring vertex.
    pub n: Vec<f64>,
    pub dn: Vec<Vec2>,
    /// All approximation functions (standard and enriched) in element dof order.
    pub psi: Vec<f64>,
    pub dpsi: Vec<Vec2>,
}

/// Everything needed to evaluate the enriched approximation on one element.
#[derive(Debug, Clone)]
pub struct ElementContext {
    pub element: usize,
    pub ring: Vec<Vec2>,
    pub nodes: Vec<usize>,
    /// (local vertex, kind) per function; each function carries two dofs.
    pub funcs: Vec<(usize, FunctionKind)>,
    /// Global dofs, two per function.
    pub dofs: Vec<usize>,
    /// H(X_a) or A(X_a) of the function's node.
    shift: Vec<f64>,
    tip_local: Vec<usize>,
    /// Constant gradient correction per vertex (zero when disabled).
    pub correction: Vec<Vec2>,
    crack: Option<CrackGeometry>,
}

impl ElementContext {
    pub fn new(mesh: &PolyMesh, map: &EnrichmentMap, e: usize) -> Self {
        let nodes = mesh.elements[e].clone();
        let mut funcs = Vec::new();
        let mut dofs = Vec::new();
        let mut shift = Vec::new();
        for (a, &i) in nodes.iter().enumerate() {
            let ne = map.nodes[i];
            let base = map.offsets[i];
            funcs.push((a, FunctionKind::Standard));
            shift.push(0.0);
            dofs.extend([base, base + 1]);
            let mut off = base + 2;
            if ne.heaviside {
                funcs.push((a, FunctionKind::Heaviside));
                shift.push(map.node_h[i]);
                dofs.extend([off, off + 1]);
                off += 2;
            }
            if ne.tip {
                funcs.push((a, FunctionKind::Tip));
                shift.push(map.node_a[i]);
                dofs.extend([off, off + 1]);
            }
        }
        let tip_local = nodes
            .iter()
            .enumerate()
            .filter(|(_, &i)| map.nodes[i].tip)
            .map(|(a, _)| a)
            .collect();
        ElementContext {
            element: e,
            ring: mesh.ring(e),
            correction: vec![Vec2::zeros(); nodes.len()],
            nodes,
            funcs,
            dofs,
            shift,
            tip_local,
            crack: map.crack.clone(),
        }
    }

    pub fn n_funcs(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_enriched(&self) -> bool {
        self.funcs.len() > self.nodes.len()
    }

    /// Evaluate at undeformed point `x`. `side` fixes the Heaviside value when the
    /// point is known to lie in a given crack sub-polygon.
    pub fn evaluate(&self, x: &Vec2, side: Option<f64>) -> Result<FunctionEval> {
        let s = mean_value_grad(&self.ring, x)?;
        self.evaluate_with(x, &s, side)
    }

    pub fn evaluate_with(
        &self,
        x: &Vec2,
        s: &ShapeEval,
        side: Option<f64>,
    ) -> Result<FunctionEval> {
        let n = s.values.clone();
        let dn: Vec<Vec2> = s
            .grads
            .iter()
            .zip(&self.correction)
            .map(|(g, c)| g + c)
            .collect();
        let has_h = self.funcs.iter().any(|f| f.1 == FunctionKind::Heaviside);
        let has_tip = !self.tip_local.is_empty();
        let h = if has_h {
            match side {
                Some(v) => v,
                None => self.crack.as_ref().map(|c| c.heaviside(x)).unwrap_or(1.0),
            }
        } else {
            0.0
        };
        let (a, da, r, dr) = if has_tip {
            let c = self
                .crack
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("tip enrichment without a crack".into()))?;
            let (a, da) = c.tip_branch(x)?;
            let r: f64 = self.tip_local.iter().map(|&k| n[k]).sum();
            let dr: Vec2 = self
                .tip_local
                .iter()
                .fold(Vec2::zeros(), |acc, &k| acc + dn[k]);
            (a, da, r, dr)
        } else {
            (0.0, Vec2::zeros(), 0.0, Vec2::zeros())
        };
        let mut psi = Vec::with_capacity(self.funcs.len());
        let mut dpsi = Vec::with_capacity(self.funcs.len());
        for (f, &(k, kind)) in self.funcs.iter().enumerate() {
            match kind {
                FunctionKind::Standard => {
                    psi.push(n[k]);
                    dpsi.push(dn[k]);
                }
                FunctionKind::Heaviside => {
                    let hs = h - self.shift[f];
                    psi.push(n[k] * hs);
                    dpsi.push(dn[k] * hs);
                }
                FunctionKind::Tip => {
                    let as_ = a - self.shift[f];
                    psi.push(n[k] * r * as_);
                    dpsi.push(dn[k] * (r * as_) + dr * (n[k] * as_) + da * (n[k] * r));
                }
            }
        }
        Ok(FunctionEval { n, dn, psi, dpsi })
    }

    /// Displacement at undeformed point `x` from element dof values.
    pub fn displacement(&self, x: &Vec2, u_elem: &[f64], side: Option<f64>) -> Result<Vec2> {
        let ev = self.evaluate(x, side)?;
        Ok(ev
            .psi
            .iter()
            .enumerate()
            .fold(Vec2::zeros(), |acc, (f, p)| {
                acc + Vec2::new(u_elem[2 * f], u_elem[2 * f + 1]) * *p
            }))
    }
}

/// Gather element dof values from the global vector.
pub fn gather(dofs: &[usize], u: &DVector<f64>) -> Vec<f64> {
    dofs.iter().map(|&d| u[d]).collect()
}

/// F = I + sum_f u_f (x) grad psi_f.
pub fn deformation_gradient(dpsi: &[Vec2], u_elem: &[f64]) -> Matrix2<f64> {
    let mut f = Matrix2::identity();
    for (k, g) in dpsi.iter().enumerate() {
        let (ux, uy) = (u_elem[2 * k], u_elem[2 * k + 1]);
        f[(0, 0)] += ux * g.x;
        f[(0, 1)] += ux * g.y;
        f[(1, 0)] += uy * g.x;
        f[(1, 1)] += uy * g.y;
    }
    f
}

/// Jacobians of the two-stage map: reference triangle -> undeformed -> current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobians {
    /// J0[a][b] = dX_b / d xi_a.
    pub j0: Matrix2<f64>,
    /// J[a][i] = dx_i / d xi_a.
    pub j: Matrix2<f64>,
    /// Inverse of J0.
    pub f0: Matrix2<f64>,
    /// Inverse of J.
    pub fbar: Matrix2<f64>,
    /// Deformation gradient F_ij = dx_i / dX_j.
    pub f: Matrix2<f64>,
}

/// Jacobians at reference point (xi, eta) of an undeformed sub-triangle of the element.
/// The current position includes the enriched terms, all evaluated at undeformed X.
pub fn xfem_jacobians(
    ctx: &ElementContext,
    tri: &[Vec2; 3],
    xi: f64,
    eta: f64,
    u_elem: &[f64],
    side: Option<f64>,
) -> Result<Jacobians> {
    let x = tri[0] + (tri[1] - tri[0]) * xi + (tri[2] - tri[0]) * eta;
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let j0 = Matrix2::new(e1.x, e1.y, e2.x, e2.y);
    let det0 = j0.determinant();
    if !(det0 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "reference map degenerate (det J0 = {det0:e})"
        )));
    }
    let ev = ctx.evaluate(&x, side)?;
    let mut j = j0;
    for (f, g) in ev.dpsi.iter().enumerate() {
        let (ux, uy) = (u_elem[2 * f], u_elem[2 * f + 1]);
        for a in 0..2 {
            // d psi / d xi_a through the undeformed coordinates
            let dpa = j0[(a, 0)] * g.x + j0[(a, 1)] * g.y;
            j[(a, 0)] += dpa * ux;
            j[(a, 1)] += dpa * uy;
        }
    }
    let det = j.determinant();
    if !(det > 0.0) {
        return Err(Error::Inversion {
            element: ctx.element,
            det,
        });
    }
    let f0 = j0.try_inverse().unwrap();
    let fbar = j.try_inverse().unwrap();
    let f = Matrix2::from_fn(|i, jj| (0..2).map(|a| j[(a, i)] * f0[(jj, a)]).sum());
    Ok(Jacobians { j0, j, f0, fbar, f })
}

/// Symmetric-gradient operator B (3 x 2n, Voigt rows xx, yy, xy) and full-gradient
/// operator G (4 x 2n, rows du_x/dx, du_x/dy, du_y/dx, du_y/dy) from spatial gradients.
pub fn build_b_g(grads: &[Vec2]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = grads.len();
    let mut b = DMatrix::zeros(3, 2 * n);
    let mut g = DMatrix::zeros(4, 2 * n);
    for (a, d) in grads.iter().enumerate() {
        b[(0, 2 * a)] = d.x;
        b[(1, 2 * a + 1)] = d.y;
        b[(2, 2 * a)] = d.y;
        b[(2, 2 * a + 1)] = d.x;
        g[(0, 2 * a)] = d.x;
        g[(1, 2 * a)] = d.y;
        g[(2, 2 * a + 1)] = d.x;
        g[(3, 2 * a + 1)] = d.y;
    }
    (b, g)
}

/// Spatial gradients d psi / dx = F^-T d psi / dX.
pub fn spatial_gradients(f: &Matrix2<f64>, dpsi: &[Vec2]) -> Result<Vec<Vec2>> {
    let fit = f
        .try_inverse()
        .ok_or(Error::Inversion {
            element: usize::MAX,
            det: f.determinant(),
        })?
        .transpose();
    Ok(dpsi.iter().map(|g| fit * g).collect())
}

/// Quadrature point with everything precomputed on the undeformed element.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadPoint {
    pub x: Vec2,
    /// Undeformed area weight.
    pub weight: f64,
    pub eval: FunctionEval,
}

#[derive(Debug, Clone)]
pub struct ElementIntegration {
    pub ctx: ElementContext,
    pub points: Vec<QuadPoint>,
    pub kind: ElementKind,
}

/// Tip element: fan from the tip, the fan triangle crossed by the crack split in two,
/// collapsed rule at the tip.
fn tip_quadrature(
    ring: &[Vec2],
    crack: &CrackGeometry,
    order: usize,
) -> Result<Vec<(Vec2, f64, Option<f64>)>> {
    let tip = crack.tip();
    let back = -crack.tangent();
    let far = tip + back * (4.0 * geometry::diameter(ring));
    let n = ring.len();
    let rule = collapsed_rule(order);
    let mut out = Vec::new();
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        let mut tris = Vec::new();
        match geometry::segment_intersection(&tip, &far, &a, &b) {
            Some((s, u)) if s > 0.0 && (0.0..=1.0).contains(&u) => {
                let p = a + (b - a) * u;
                if u > 1e-12 {
                    tris.push([tip, a, p]);
                }
                if u < 1.0 - 1e-12 {
                    tris.push([tip, p, b]);
                }
            }
            _ => tris.push([tip, a, b]),
        }
        for t in tris {
            if geometry::cross(&(t[1] - t[0]), &(t[2] - t[0])) <= 0.0 {
                return Err(Error::InvalidInput(
                    "crack tip element is not star-shaped about the tip".into(),
                ));
            }
            let q = map_rule(&t, &rule, order);
            out.extend(
                q.points
                    .into_iter()
                    .zip(q.weights)
                    .map(|(p, w)| (p, w, None)),
            );
        }
    }
    Ok(out)
}

fn polygon_points(poly: &[Vec2], order: usize, side: Option<f64>) -> Vec<(Vec2, f64, Option<f64>)> {
    let rule = triangle_rule(order);
    let mut out = Vec::new();
    let min_area = 1e-14 * geometry::diameter(poly).powi(2);
    // cut pieces can carry collinear vertices; their zero-area ears hold no weight
    for t in triangulate(poly)
        .into_iter()
        .filter(|t| geometry::cross(&(t[1] - t[0]), &(t[2] - t[0])) > min_area)
    {
        let q = map_rule(&t, &rule, order);
        out.extend(
            q.points
                .into_iter()
                .zip(q.weights)
                .map(|(p, w)| (p, w, side)),
        );
    }
    out
}

/// Quadrature points (undeformed), weights and fixed crack side per element kind.
pub fn element_quadrature(
    mesh: &PolyMesh,
    map: &EnrichmentMap,
    e: usize,
    opts: &BasisOptions,
) -> Result<Vec<(Vec2, f64, Option<f64>)>> {
    let ring = mesh.ring(e);
    match map.kinds[e] {
        ElementKind::Standard => Ok(polygon_points(&ring, opts.standard_order, None)),
        ElementKind::Blending => Ok(polygon_points(&ring, opts.enriched_order, None)),
        ElementKind::Tip => tip_quadrature(&ring, map.crack.as_ref().unwrap(), opts.enriched_order),
        ElementKind::Split => {
            let cut = map.cuts[e].as_ref().unwrap();
            let crack = map.crack.as_ref().unwrap();
            let (plus, minus) = split_polygon(&ring, cut);
            let mut pts = Vec::new();
            for part in [plus, minus] {
                if part.len() < 3 || geometry::signed_area(&part) <= 0.0 {
                    continue;
                }
                let side = crack.heaviside(&geometry::centroid(&part));
                pts.extend(polygon_points(&part, opts.enriched_order, Some(side)));
            }
            Ok(pts)
        }
    }
}

/// Precompute function values and (corrected) gradients at every quadrature point.
pub fn integrate_element(
    mesh: &PolyMesh,
    map: &EnrichmentMap,
    e: usize,
    opts: &BasisOptions,
) -> Result<ElementIntegration> {
    let mut ctx = ElementContext::new(mesh, map, e);
    let pts = element_quadrature(mesh, map, e, opts)?;
    let raw = pts
        .iter()
        .map(|(x, _, _)| mean_value_grad(&ctx.ring, x))
        .collect::<Result<Vec<_>>>()?;
    if opts.correct_gradients {
        let scheme = QuadratureScheme {
            points: pts.iter().map(|p| p.0).collect(),
            weights: pts.iter().map(|p| p.1).collect(),
            triangle_order: 0,
        };
        ctx.correction = crate::basis::correction_vectors(&ctx.ring, &scheme, &raw)?;
    }
    let mut points = Vec::with_capacity(pts.len());
    for ((x, w, side), s) in pts.iter().zip(&raw) {
        points.push(QuadPoint {
            x: *x,
            weight: *w,
            eval: ctx.evaluate_with(x, s, *side)?,
        });
    }
    Ok(ElementIntegration {
        ctx,
        points,
        kind: map.kinds[e],
    })
}

#[cfg(test)]
mod tests {
    use super::super::classify::classify;
    use super::*;
    use crate::mesh::{structured_quad_mesh, Domain};

    fn setup() -> (PolyMesh, EnrichmentMap) {
        let m = structured_quad_mesh(&Domain::rectangle(Vec2::zeros(), Vec2::new(4.0, 4.0)), 4, 4)
            .unwrap();
        let c = CrackGeometry::new(vec![Vec2::new(-1.0, 2.5), Vec2::new(1.5, 2.5)]).unwrap();
        let map = classify(&m, &c).unwrap();
        (m, map)
    }

    #[test]
    fn weights_cover_every_element() {
        let (m, map) = setup();
        for e in 0..m.num_elements() {
            let q = element_quadrature(&m, &map, e, &BasisOptions::default()).unwrap();
            let total: f64 = q.iter().map(|p| p.1).sum();
            assert!((total - m.element_area(e)).abs() < 1e-12, "element {e}");
        }
    }

    #[test]
    fn enrichment_vanishes_at_nodes() {
        let (m, map) = setup();
        let e = map.tip_element.unwrap();
        let ctx = ElementContext::new(&m, &map, e);
        let u: Vec<f64> = (0..ctx.dofs.len())
            .map(|k| if k < 2 { 0.0 } else { (k as f64).sin() })
            .collect();
        for (a, &i) in ctx.nodes.iter().enumerate() {
            let mut shape_u = vec![0.0; ctx.dofs.len()];
            // only enriched dofs non-zero
            for (f, &(_, kind)) in ctx.funcs.iter().enumerate() {
                if kind != FunctionKind::Standard {
                    shape_u[2 * f] = u[2 * f];
                    shape_u[2 * f + 1] = u[2 * f + 1];
                }
            }
            // move slightly inside to stay off the boundary
            let x = m.nodes[i] + (geometry::centroid(&ctx.ring) - m.nodes[i]) * 1e-10;
            let d = ctx.displacement(&x, &shape_u, None).unwrap();
            assert!(d.norm() < 1e-4, "vertex {a}: {d:?}");
        }
    }

    #[test]
    fn zero_displacement_gives_identity() {
        let (m, map) = setup();
        let e = map.tip_element.unwrap();
        let ctx = ElementContext::new(&m, &map, e);
        let tri = [ctx.ring[0], ctx.ring[1], geometry::centroid(&ctx.ring)];
        let jac = xfem_jacobians(&ctx, &tri, 0.2, 0.3, &vec![0.0; ctx.dofs.len()], None).unwrap();
        assert!((jac.f - Matrix2::identity()).norm() < 1e-15);
        assert_eq!(jac.j, jac.j0);
    }
}
