use crate::error::{Error, Result};
use crate::geometry::{self, Vec2};

/// Shape function values and gradients at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeEval {
    pub values: Vec<f64>,
    pub grads: Vec<Vec2>,
    /// True once the element gradient correction has been added.
    pub corrected: bool,
}

enum Location {
    Vertex(usize),
    /// On edge (i, i+1) at parameter t.
    Edge(usize, f64),
    Inside,
}

fn locate(ring: &[Vec2], x: &Vec2) -> Result<Location> {
    let n = ring.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "polygon needs at least 3 vertices, got {n}"
        )));
    }
    let diam = geometry::diameter(ring);
    let vtol = 1e-12 * diam;
    for (i, v) in ring.iter().enumerate() {
        if (v - x).norm() <= vtol {
            return Ok(Location::Vertex(i));
        }
    }
    let etol = 1e-13 * diam;
    for i in 0..n {
        let (d, t) = geometry::distance_to_segment(x, &ring[i], &ring[(i + 1) % n]);
        if d <= etol {
            return Ok(Location::Edge(i, t));
        }
    }
    if !geometry::point_in_polygon(x, ring) {
        return Err(Error::OutsidePolygon(x.x, x.y));
    }
    Ok(Location::Inside)
}

/// tan(alpha_i / 2) for the angle at `x` subtended by edge (r_i, r_{i+1}), with gradient.
/// Two algebraically equal forms are used so that neither denominator cancels.
fn half_tan(ri: &Vec2, rj: &Vec2, di: f64, dj: f64) -> (f64, Vec2) {
    let c = geometry::cross(ri, rj);
    let dot = ri.dot(rj);
    // r = v - x, so d r / d x = -I
    let grad_c = Vec2::new(ri.y - rj.y, rj.x - ri.x);
    let grad_dd = -(ri * (dj / di) + rj * (di / dj));
    let grad_dot = -(ri + rj);
    if dot >= 0.0 {
        let den = di * dj + dot;
        let t = c / den;
        (t, (grad_c - (grad_dd + grad_dot) * t) / den)
    } else {
        let num = di * dj - dot;
        let t = num / c;
        (t, ((grad_dd - grad_dot) - grad_c * t) / c)
    }
}

fn raw_weights(ring: &[Vec2], x: &Vec2) -> (Vec<f64>, Vec<Vec2>) {
    let n = ring.len();
    let r: Vec<Vec2> = ring.iter().map(|v| v - x).collect();
    let d: Vec<f64> = r.iter().map(|v| v.norm()).collect();
    let tans: Vec<(f64, Vec2)> = (0..n)
        .map(|i| half_tan(&r[i], &r[(i + 1) % n], d[i], d[(i + 1) % n]))
        .collect();
    let mut w = vec![0.0; n];
    let mut gw = vec![Vec2::zeros(); n];
    for i in 0..n {
        let (tp, gp) = tans[(i + n - 1) % n];
        let (ti, gi) = tans[i];
        w[i] = (tp + ti) / d[i];
        // grad(1/d_i) = r_i / d_i^3
        gw[i] = (gp + gi) / d[i] + r[i] * ((tp + ti) / (d[i] * d[i] * d[i]));
    }
    (w, gw)
}

/// Mean value coordinates of `x` with respect to the counter-clockwise `ring`.
pub fn mean_value_shape(ring: &[Vec2], x: &Vec2) -> Result<Vec<f64>> {
    let n = ring.len();
    match locate(ring, x)? {
        Location::Vertex(i) => {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            Ok(v)
        }
        Location::Edge(i, t) => {
            let mut v = vec![0.0; n];
            v[i] = 1.0 - t;
            v[(i + 1) % n] = t;
            Ok(v)
        }
        Location::Inside => {
            let (w, _) = raw_weights(ring, x);
            let s: f64 = w.iter().sum();
            Ok(w.iter().map(|wi| wi / s).collect())
        }
    }
}

/// Values and analytic (uncorrected) gradients. Gradients are not defined on the boundary.
pub fn mean_value_grad(ring: &[Vec2], x: &Vec2) -> Result<ShapeEval> {
    match locate(ring, x)? {
        Location::Inside => {}
        _ => {
            return Err(Error::InvalidInput(format!(
                "gradient requested on the polygon boundary at ({}, {})",
                x.x, x.y
            )))
        }
    }
    let (w, gw) = raw_weights(ring, x);
    let s: f64 = w.iter().sum();
    let gs: Vec2 = gw.iter().fold(Vec2::zeros(), |a, g| a + g);
    let values: Vec<f64> = w.iter().map(|wi| wi / s).collect();
    let grads = gw
        .iter()
        .zip(values.iter())
        .map(|(g, &ni)| (g - gs * ni) / s)
        .collect();
    Ok(ShapeEval {
        values,
        grads,
        corrected: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square() -> Vec<Vec2> {
        geometry::rectangle(Vec2::zeros(), Vec2::new(1.0, 1.0))
    }

    #[test]
    fn square_center_is_quarter() {
        let s = mean_value_grad(&square(), &Vec2::new(0.5, 0.5)).unwrap();
        for v in &s.values {
            assert!((v - 0.25).abs() < 1e-15);
        }
        let expect = [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)];
        for (g, e) in s.grads.iter().zip(expect) {
            assert!(
                (g.x - e.0).abs() < 1e-14 && (g.y - e.1).abs() < 1e-14,
                "{g:?}"
            );
        }
    }

    #[test]
    fn triangle_is_barycentric() {
        let tri = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ];
        let v = mean_value_shape(&tri, &Vec2::new(0.25, 0.25)).unwrap();
        assert!(
            (v[0] - 0.5).abs() < 1e-15
                && (v[1] - 0.25).abs() < 1e-15
                && (v[2] - 0.25).abs() < 1e-15
        );
    }

    #[test]
    fn pentagon_matches_high_precision_values() {
        // 40-digit evaluation of the tan(alpha/2) weights
        let expect = [
            0.22843113415546908474,
            0.13777740559077974402,
            0.12975629702144258959,
            0.19837239112535375404,
            0.3056627721069548276,
        ];
        let ring: Vec<Vec2> = (0..5)
            .map(|k| {
                let a = PI / 2.0 + 2.0 * PI * k as f64 / 5.0;
                Vec2::new(a.cos(), a.sin())
            })
            .collect();
        let v = mean_value_shape(&ring, &Vec2::new(0.2, 0.1)).unwrap();
        for (a, b) in v.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn vertex_and_edge_limits() {
        let sq = square();
        assert_eq!(
            mean_value_shape(&sq, &Vec2::new(1.0, 0.0)).unwrap(),
            vec![0.0, 1.0, 0.0, 0.0]
        );
        let v = mean_value_shape(&sq, &Vec2::new(1.0, 0.25)).unwrap();
        assert!((v[1] - 0.75).abs() < 1e-15 && (v[2] - 0.25).abs() < 1e-15);
        assert!(matches!(
            mean_value_shape(&sq, &Vec2::new(1.5, 0.5)),
            Err(Error::OutsidePolygon(..))
        ));
        // just inside an edge the values approach the linear trace
        let v = mean_value_shape(&sq, &Vec2::new(1.0 - 1e-9, 0.25)).unwrap();
        assert!((v[1] - 0.75).abs() < 1e-7 && (v[2] - 0.25).abs() < 1e-7);
    }
}
