use std::f64::consts::PI;

use nalgebra::{DVector, Matrix2};

use super::jintegral::JDomain;
use crate::enrichment::gather;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::solver::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    I,
    II,
}

/// Elastic constants for the auxiliary fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LefmConstants {
    pub mu: f64,
    pub kappa: f64,
    /// E' = E (plane stress) or E / (1 - nu^2) (plane strain).
    pub e_prime: f64,
    /// Lamé constants of the in-plane Hooke law.
    pub lambda_eff: f64,
}

impl LefmConstants {
    pub fn new(e: f64, nu: f64, plane_strain: bool) -> Self {
        let mu = e / (2.0 * (1.0 + nu));
        if plane_strain {
            LefmConstants {
                mu,
                kappa: 3.0 - 4.0 * nu,
                e_prime: e / (1.0 - nu * nu),
                lambda_eff: e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)),
            }
        } else {
            LefmConstants {
                mu,
                kappa: (3.0 - nu) / (1.0 + nu),
                e_prime: e,
                lambda_eff: e * nu / (1.0 - nu * nu),
            }
        }
    }

    /// Constants matching the small-strain limit of a material model.
    pub fn for_model(model: &Model) -> Self {
        let (e, nu) = model.material.engineering_constants();
        LefmConstants::new(e, nu, !model.material.is_plane_stress())
    }
}

/// Williams displacement gradient (d u_i / d x_j) in the tip frame, for unit K.
pub fn williams_gradient(r: f64, th: f64, mode: Mode, c: &LefmConstants) -> Matrix2<f64> {
    let k = c.kappa;
    let (sh, ch) = (0.5 * th).sin_cos();
    // u_i = A sqrt(r) g_i(theta)
    let a = 1.0 / (2.0 * c.mu * (2.0 * PI).sqrt());
    let (g, dg) = match mode {
        Mode::I => (
            [
                ch * (k - 1.0 + 2.0 * sh * sh),
                sh * (k + 1.0 - 2.0 * ch * ch),
            ],
            [
                0.5 * (-sh * (k - 1.0 + 2.0 * sh * sh) + 4.0 * sh * ch * ch),
                0.5 * (ch * (k + 1.0 - 2.0 * ch * ch) + 4.0 * sh * sh * ch),
            ],
        ),
        Mode::II => (
            [
                sh * (k + 1.0 + 2.0 * ch * ch),
                -ch * (k - 1.0 - 2.0 * sh * sh),
            ],
            [
                0.5 * (ch * (k + 1.0 + 2.0 * ch * ch) - 4.0 * sh * sh * ch),
                0.5 * (sh * (k - 1.0 - 2.0 * sh * sh) + 4.0 * sh * ch * ch),
            ],
        ),
    };
    let sr = r.sqrt();
    let (st, ct) = th.sin_cos();
    let mut out = Matrix2::zeros();
    for i in 0..2 {
        let du_dr = a * g[i] / (2.0 * sr);
        let du_dth = a * sr * dg[i];
        out[(i, 0)] = ct * du_dr - st / r * du_dth;
        out[(i, 1)] = st * du_dr + ct / r * du_dth;
    }
    out
}

/// Williams displacement in the tip frame, for unit K.
pub fn williams_displacement(r: f64, th: f64, mode: Mode, c: &LefmConstants) -> Vec2 {
    let k = c.kappa;
    let (sh, ch) = (0.5 * th).sin_cos();
    let a = (r / (2.0 * PI)).sqrt() / (2.0 * c.mu);
    match mode {
        Mode::I => {
            Vec2::new(
                ch * (k - 1.0 + 2.0 * sh * sh),
                sh * (k + 1.0 - 2.0 * ch * ch),
            ) * a
        }
        Mode::II => {
            Vec2::new(
                sh * (k + 1.0 + 2.0 * ch * ch),
                -ch * (k - 1.0 - 2.0 * sh * sh),
            ) * a
        }
    }
}

/// Hooke stress of a displacement gradient.
pub fn hooke(grad: &Matrix2<f64>, c: &LefmConstants) -> Matrix2<f64> {
    let eps = (grad + grad.transpose()) * 0.5;
    Matrix2::identity() * (c.lambda_eff * eps.trace()) + eps * (2.0 * c.mu)
}

/// Interaction integral with the auxiliary field of `mode` (unit K), in the tip frame:
/// I = ∫ (σ_ij u^a_i,1 + σ^a_ij u_i,1 - σ^a_ij ε_ij δ_1j) q,j dA.
pub fn interaction_integral(
    model: &Model,
    u: &DVector<f64>,
    domain: &JDomain,
    mode: Mode,
    c: &LefmConstants,
) -> Result<f64> {
    let crack = model
        .map
        .crack
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("no crack in the model".into()))?;
    let t = domain.tangent;
    // columns: local axes in global components
    let rot = Matrix2::new(t.x, -t.y, t.y, t.x);
    let mut total = 0.0;
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
            let grad_u = ps.f - Matrix2::identity();
            // to the tip frame
            let pl = rot.transpose() * p * rot;
            let gl = rot.transpose() * grad_u * rot;
            let ql = rot.transpose() * gq;
            let (r, th) = crack.tip_polar(&qp.x);
            let ga = williams_gradient(r, th, mode, c);
            let sa = hooke(&ga, c);
            let eps = (gl + gl.transpose()) * 0.5;
            let w_int = sa.component_mul(&eps).sum();
            let mut integrand = -w_int * ql.x;
            for i in 0..2 {
                for j in 0..2 {
                    integrand += (pl[(i, j)] * ga[(i, 0)] + sa[(i, j)] * gl[(i, 0)]) * ql[j];
                }
            }
            total += integrand * qp.weight;
        }
    }
    Ok(total)
}

/// Mode I and II stress intensity factors [Pa sqrt(mm)].
pub fn stress_intensity_factors(
    model: &Model,
    u: &DVector<f64>,
    domain: &JDomain,
) -> Result<(f64, f64)> {
    let c = LefmConstants::for_model(model);
    let k1 = interaction_integral(model, u, domain, Mode::I, &c)? * c.e_prime / 2.0;
    let k2 = interaction_integral(model, u, domain, Mode::II, &c)? * c.e_prime / 2.0;
    Ok((k1, k2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_differences() {
        let c = LefmConstants::new(50e3, 0.3, true);
        for mode in [Mode::I, Mode::II] {
            for &(x, y) in &[(0.3, 0.2), (-0.4, 0.1), (0.1, -0.5), (-0.2, -0.3)] {
                let polar = |x: f64, y: f64| ((x * x + y * y).sqrt(), f64::atan2(y, x));
                let (r, th) = polar(x, y);
                let g = williams_gradient(r, th, mode, &c);
                let h = 1e-7;
                for j in 0..2 {
                    let (dx, dy) = if j == 0 { (h, 0.0) } else { (0.0, h) };
                    let (rp, tp) = polar(x + dx, y + dy);
                    let (rm, tm) = polar(x - dx, y - dy);
                    let fd = (williams_displacement(rp, tp, mode, &c)
                        - williams_displacement(rm, tm, mode, &c))
                        / (2.0 * h);
                    for i in 0..2 {
                        assert!(
                            (fd[i] - g[(i, j)]).abs() < 1e-6 * g.norm(),
                            "{mode:?} {i}{j}: {} vs {}",
                            fd[i],
                            g[(i, j)]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn hooke_of_williams_field_is_the_classical_stress() {
        let c = LefmConstants::new(50e3, 0.3, true);
        let (r, th) = (0.2f64, 1.1f64);
        let s = hooke(&williams_gradient(r, th, Mode::I, &c), &c);
        let f = 1.0 / (2.0 * PI * r).sqrt();
        let (sh, ch) = (0.5 * th).sin_cos();
        let (s3, c3) = (1.5 * th).sin_cos();
        assert!((s[(0, 0)] - f * ch * (1.0 - sh * s3)).abs() < 1e-12 * f);
        assert!((s[(1, 1)] - f * ch * (1.0 + sh * s3)).abs() < 1e-12 * f);
        assert!((s[(0, 1)] - f * ch * sh * c3).abs() < 1e-12 * f);
        let s = hooke(&williams_gradient(r, th, Mode::II, &c), &c);
        assert!((s[(0, 0)] + f * sh * (2.0 + ch * c3)).abs() < 1e-12 * f);
        assert!((s[(1, 1)] - f * sh * ch * c3).abs() < 1e-12 * f);
        assert!((s[(0, 1)] - f * ch * (1.0 - sh * s3)).abs() < 1e-12 * f);
    }
}
