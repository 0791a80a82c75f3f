use nalgebra::{DVector, Matrix2};

use crate::enrichment::gather;
use crate::error::{Error, Result};
use crate::geometry::{self, Vec2};
use crate::solver::Model;

/// Integration domain around the crack tip.
#[derive(Debug, Clone, PartialEq)]
pub struct JDomain {
    pub tip: Vec2,
    /// Unit crack tangent at the tip (local X1).
    pub tangent: Vec2,
    pub radius: f64,
    /// Elements with a non-zero q gradient somewhere.
    pub elements: Vec<usize>,
    /// Nodal plateau weight.
    pub q: Vec<f64>,
    /// The circle of radius `radius` leaves the body.
    pub reduced: bool,
}

impl JDomain {
    /// q = 1 within radius/2 of the tip, 0 beyond radius, linear in between.
    pub fn new(model: &Model, radius: f64) -> Result<Self> {
        let crack = model
            .map
            .crack
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("no crack in the model".into()))?;
        if !(radius > 0.0) {
            return Err(Error::InvalidInput(format!(
                "J domain radius must be positive, got {radius}"
            )));
        }
        let tip = crack.tip();
        let q: Vec<f64> = model
            .mesh
            .nodes
            .iter()
            .map(|x| ((radius - (x - tip).norm()) / (0.5 * radius)).clamp(0.0, 1.0))
            .collect();
        let elements: Vec<usize> = model
            .mesh
            .elements
            .iter()
            .enumerate()
            .filter(|(_, r)| {
                let (lo, hi) = r.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &i| {
                    (lo.min(q[i]), hi.max(q[i]))
                });
                hi > 0.0 && hi > lo
            })
            .map(|(e, _)| e)
            .collect();
        if let Some(te) = model.map.tip_element {
            if model.mesh.elements[te].iter().any(|&i| q[i] < 1.0) {
                return Err(Error::InvalidInput(format!(
                    "J domain radius {radius} does not cover the tip element; use at least {:.4}",
                    2.0 * geometry::diameter(&model.mesh.ring(te))
                )));
            }
        }
        // boundary edges inside the circle other than those the crack mouth touches
        let reduced = model.mesh.boundary_edges().iter().any(|&[a, b]| {
            let (d, _) =
                geometry::distance_to_segment(&tip, &model.mesh.nodes[a], &model.mesh.nodes[b]);
            d < radius
                && crack
                    .distance(&model.mesh.nodes[a])
                    .min(crack.distance(&model.mesh.nodes[b]))
                    > 1e-9 * radius
        });
        if reduced {
            log::warn!("J domain of radius {radius} is clipped by the boundary; reduced domain");
        }
        Ok(JDomain {
            tip,
            tangent: crack.tangent(),
            radius,
            elements,
            q,
            reduced,
        })
    }

    /// Gradient of q at quadrature point `qp` of element `e`.
    pub fn grad_q(&self, model: &Model, e: usize, qp: usize) -> Vec2 {
        let el = &model.elements[e];
        let dn = &el.points[qp].eval.dn;
        el.ctx
            .nodes
            .iter()
            .zip(dn)
            .fold(Vec2::zeros(), |acc, (&i, g)| acc + g * self.q[i])
    }
}

/// Domain-form J over the undeformed configuration:
/// J = ∫ (P_ij du_i/dX1 - W δ_1j) dq/dX_j dV, with X1 along the crack tangent and the
/// sign chosen so that an opening crack releases positive energy.
pub fn j_integral(model: &Model, u: &DVector<f64>, domain: &JDomain) -> Result<f64> {
    let t = domain.tangent;
    let mut j = 0.0;
    for &e in &domain.elements {
        let el = &model.elements[e];
        let ue = gather(&el.ctx.dofs, u);
        for (q, qp) in el.points.iter().enumerate() {
            let gq = domain.grad_q(model, e, q);
            if gq.norm_squared() == 0.0 {
                continue;
            }
            let ps = model.point_state(e, q, &ue)?;
            let p = if model.material.is_linear() {
                ps.response.pk2
            } else {
                ps.f * ps.response.pk2
            };
            let du1: Vec2 = (ps.f - Matrix2::identity()) * t;
            let integrand = du1.dot(&(p * gq)) - ps.response.energy * t.dot(&gq);
            j += integrand * qp.weight;
        }
    }
    Ok(j)
}

/// Largest opening between the crack faces, sampled along the crack in the undeformed
/// configuration and measured between the deformed images of the two faces.
pub fn crack_opening(model: &Model, u: &DVector<f64>, samples: usize) -> Result<f64> {
    let crack = model
        .map
        .crack
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("no crack in the model".into()))?;
    let h = model.mesh.characteristic_size();
    let bbox = model.mesh.bounding_box();
    let mut best: f64 = 0.0;
    let total = crack.length();
    for k in 0..samples {
        let s = (k as f64 + 0.5) / samples as f64 * total;
        let Some((x, n)) = crack.point_at(s) else {
            continue;
        };
        let eps = 1e-7 * h;
        let (xp, xm) = (x + n * eps, x - n * eps);
        if !bbox.contains(&xp, 0.0) || !bbox.contains(&xm, 0.0) {
            continue;
        }
        let (Ok(up), Ok(um)) = (
            model.displacement_at(&xp, u, Some(1.0)),
            model.displacement_at(&xm, u, Some(-1.0)),
        ) else {
            continue;
        };
        best = best.max(((xp + up) - (xm + um)).norm());
    }
    Ok(best)
}
