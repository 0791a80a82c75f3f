use super::mvc::{mean_value_grad, mean_value_shape, ShapeEval};
use super::quadrature::{gauss_legendre, QuadratureScheme};
use crate::error::{Error, Result};
use crate::geometry::{self, Vec2};

/// Boundary term: integral of N_a n over the element boundary, 2-point Gauss per edge.
pub fn boundary_flux(ring: &[Vec2]) -> Result<Vec<Vec2>> {
    let n = ring.len();
    let g = gauss_legendre(2);
    let mut out = vec![Vec2::zeros(); n];
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        let e = b - a;
        // outward normal times edge length for a counter-clockwise ring
        let nl = Vec2::new(e.y, -e.x);
        for &(s, w) in &g {
            let v = mean_value_shape(ring, &(a + e * s))?;
            for k in 0..n {
                out[k] += nl * (w * v[k]);
            }
        }
    }
    Ok(out)
}

/// Per-function constant c_a = (1/|Omega|)(boundary flux - sum_q w_q grad N_a).
pub fn correction_vectors(
    ring: &[Vec2],
    scheme: &QuadratureScheme,
    raw: &[ShapeEval],
) -> Result<Vec<Vec2>> {
    let area = geometry::signed_area(ring);
    if !(area > 0.0) {
        return Err(Error::InvalidInput(format!(
            "element area {area:e} is not positive"
        )));
    }
    let mut c = boundary_flux(ring)?;
    for (w, s) in scheme.weights.iter().zip(raw) {
        for (ca, g) in c.iter_mut().zip(&s.grads) {
            *ca -= g * *w;
        }
    }
    for ca in &mut c {
        *ca /= area;
    }
    Ok(c)
}

/// Add the element correction to every point's gradients.
pub fn correct_gradients(
    ring: &[Vec2],
    scheme: &QuadratureScheme,
    raw: &[ShapeEval],
) -> Result<Vec<ShapeEval>> {
    let c = correction_vectors(ring, scheme, raw)?;
    Ok(raw
        .iter()
        .map(|s| ShapeEval {
            values: s.values.clone(),
            grads: s.grads.iter().zip(&c).map(|(g, ca)| g + ca).collect(),
            corrected: true,
        })
        .collect())
}

/// Shape data at every point of `scheme`, corrected if asked.
pub fn evaluate_scheme(
    ring: &[Vec2],
    scheme: &QuadratureScheme,
    correct: bool,
) -> Result<Vec<ShapeEval>> {
    let raw = scheme
        .points
        .iter()
        .map(|x| mean_value_grad(ring, x))
        .collect::<Result<Vec<_>>>()?;
    if correct {
        correct_gradients(ring, scheme, &raw)
    } else {
        Ok(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::super::quadrature::triangulate_quadrature;
    use super::*;

    #[test]
    fn triangle_needs_no_correction() {
        let tri = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.1),
            Vec2::new(0.4, 1.3),
        ];
        let q = triangulate_quadrature(&tri, 3).unwrap();
        let raw = evaluate_scheme(&tri, &q, false).unwrap();
        for c in correction_vectors(&tri, &q, &raw).unwrap() {
            assert!(c.norm() < 1e-13);
        }
    }

    #[test]
    fn corrected_gradient_integrates_linear_field() {
        let ring: Vec<Vec2> = geometry::circle_polygon(Vec2::new(0.3, -0.2), 1.0, 5);
        let q = triangulate_quadrature(&ring, 3).unwrap();
        let s = evaluate_scheme(&ring, &q, true).unwrap();
        // u = 2x
        let mut total = 0.0;
        for (w, e) in q.weights.iter().zip(&s) {
            let dudx: f64 = e
                .grads
                .iter()
                .zip(&ring)
                .map(|(g, v)| g.x * 2.0 * v.x)
                .sum();
            total += w * dudx;
        }
        assert!((total - 2.0 * geometry::signed_area(&ring)).abs() < 1e-12);
    }
}
