use std::f64::consts::PI;

use super::mvc::mean_value_grad;
use crate::error::{Error, Result};
use crate::geometry::{self, Vec2};

/// Triangle rule order for plain polygons.
pub const DEFAULT_ORDER: usize = 3;
/// Triangle rule order for enriched polygons.
pub const ENRICHED_ORDER: usize = 7;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureScheme {
    /// Physical coordinates.
    pub points: Vec<Vec2>,
    /// Physical weights [mm^2].
    pub weights: Vec<f64>,
    pub triangle_order: usize,
}

impl QuadratureScheme {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn extend(&mut self, other: QuadratureScheme) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
    }
}

/// Gauss-Legendre nodes and weights on [0, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Newton on P_n starting from the Chebyshev-like guess
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Collapsed (Duffy) tensor rule with vertex 0 as the collapsed corner; exact for
/// polynomials of the given degree and integrates r^(-1/2) singularities at vertex 0 well.
/// Returns barycentric coordinates and weights summing to one.
pub fn collapsed_rule(degree: usize) -> Vec<([f64; 3], f64)> {
    // the Jacobian adds one degree in the collapsed direction
    let n = (degree + 3) / 2;
    let g = gauss_legendre(n.max(1));
    let mut out = Vec::with_capacity(g.len() * g.len());
    for &(u, wu) in &g {
        for &(v, wv) in &g {
            out.push(([1.0 - u, u * (1.0 - v), u * v], 2.0 * u * wu * wv));
        }
    }
    out
}

/// Positive-weight rules on the triangle: barycentric points, weights summing to one.
pub fn triangle_rule(order: usize) -> Vec<([f64; 3], f64)> {
    let sym3 = |a: f64, w: f64| {
        let b = 1.0 - 2.0 * a;
        vec![([b, a, a], w), ([a, b, a], w), ([a, a, b], w)]
    };
    let mut rule = match order {
        0 | 1 => vec![([1.0 / 3.0; 3], 1.0)],
        2 => sym3(1.0 / 6.0, 1.0 / 3.0),
        // 6-point rule, exact to degree 4
        3 | 4 => {
            let mut r = sym3(0.445_948_490_915_964_886_32, 0.223_381_589_678_011_465_70);
            r.extend(sym3(
                0.091_576_213_509_770_743_46,
                0.109_951_743_655_321_867_64,
            ));
            r
        }
        // 7-point rule, exact to degree 5
        5 => {
            let s15 = 15f64.sqrt();
            let mut r = vec![([1.0 / 3.0; 3], 0.225)];
            r.extend(sym3((6.0 + s15) / 21.0, (155.0 + s15) / 1200.0));
            r.extend(sym3((6.0 - s15) / 21.0, (155.0 - s15) / 1200.0));
            r
        }
        _ => collapsed_rule(order),
    };
    let s: f64 = rule.iter().map(|p| p.1).sum();
    for p in &mut rule {
        p.1 /= s;
    }
    rule
}

/// Map a barycentric rule onto a physical triangle.
pub fn map_rule(tri: &[Vec2; 3], rule: &[([f64; 3], f64)], order: usize) -> QuadratureScheme {
    let area = 0.5 * geometry::cross(&(tri[1] - tri[0]), &(tri[2] - tri[0]));
    let mut q = QuadratureScheme {
        points: Vec::with_capacity(rule.len()),
        weights: Vec::with_capacity(rule.len()),
        triangle_order: order,
    };
    for (l, w) in rule {
        q.points.push(tri[0] * l[0] + tri[1] * l[1] + tri[2] * l[2]);
        q.weights.push(w * area);
    }
    q
}

/// Fan triangulation from the centroid when every fan triangle is positive,
/// otherwise ear clipping.
pub fn triangulate(ring: &[Vec2]) -> Vec<[Vec2; 3]> {
    let c = geometry::centroid(ring);
    let n = ring.len();
    let scale = geometry::diameter(ring);
    let fan: Vec<[Vec2; 3]> = (0..n).map(|i| [c, ring[i], ring[(i + 1) % n]]).collect();
    let min_area = 1e-14 * scale * scale;
    // collinear ring vertices produce sliver-free fans as long as the centroid sees every edge
    if fan
        .iter()
        .all(|t| geometry::cross(&(t[1] - t[0]), &(t[2] - t[0])) > min_area)
    {
        return fan;
    }
    ear_clip(ring)
}

fn ear_clip(ring: &[Vec2]) -> Vec<[Vec2; 3]> {
    let mut idx: Vec<usize> = (0..ring.len()).collect();
    let mut out = Vec::new();
    let mut guard = 0;
    while idx.len() > 3 && guard < 10 * ring.len() * ring.len() {
        guard += 1;
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let (a, b, c) = (
                ring[idx[(k + m - 1) % m]],
                ring[idx[k]],
                ring[idx[(k + 1) % m]],
            );
            if geometry::cross(&(b - a), &(c - b)) <= 0.0 {
                continue;
            }
            let tri = [a, b, c];
            let blocked = idx.iter().any(|&j| {
                let p = ring[j];
                p != a && p != b && p != c && geometry::point_in_polygon(&p, &tri)
            });
            if !blocked {
                out.push(tri);
                idx.remove(k);
                clipped = true;
                break;
            }
        }
        if !clipped {
            break;
        }
    }
    if idx.len() == 3 {
        out.push([ring[idx[0]], ring[idx[1]], ring[idx[2]]]);
    }
    out
}

/// One-level scheme: triangulate the physical polygon and map a triangle rule onto each piece.
pub fn triangulate_quadrature(ring: &[Vec2], order: usize) -> Result<QuadratureScheme> {
    if ring.len() < 3 || geometry::signed_area(ring) <= 0.0 {
        return Err(Error::InvalidInput(
            "quadrature needs a counter-clockwise polygon with positive area".into(),
        ));
    }
    let rule = triangle_rule(order);
    let mut q = QuadratureScheme {
        points: Vec::new(),
        weights: Vec::new(),
        triangle_order: order,
    };
    for tri in triangulate(ring) {
        q.extend(map_rule(&tri, &rule, order));
    }
    Ok(q)
}

/// Regular n-gon inscribed in the unit circle, first vertex on the positive x axis.
pub fn canonical_polygon(n: usize) -> Vec<Vec2> {
    geometry::circle_polygon(Vec2::zeros(), 1.0, n)
}

/// Two-level scheme: fan-triangulate the canonical n-gon and push the points through
/// the mean value map onto the physical polygon. Only exact for affine maps.
pub fn two_level_quadrature(ring: &[Vec2], order: usize) -> Result<QuadratureScheme> {
    let n = ring.len();
    let canon = canonical_polygon(n);
    let rule = triangle_rule(order);
    let mut q = QuadratureScheme {
        points: Vec::new(),
        weights: Vec::new(),
        triangle_order: order,
    };
    for i in 0..n {
        let tri = [Vec2::zeros(), canon[i], canon[(i + 1) % n]];
        let local = map_rule(&tri, &rule, order);
        for (xi, w) in local.points.iter().zip(local.weights.iter()) {
            let s = mean_value_grad(&canon, xi)?;
            let mut x = Vec2::zeros();
            let mut jac = nalgebra::Matrix2::zeros();
            for (k, v) in ring.iter().enumerate() {
                x += v * s.values[k];
                jac += v * s.grads[k].transpose();
            }
            let det = jac.determinant();
            if det <= 0.0 {
                return Err(Error::InvalidInput(
                    "mean value map is not invertible on this polygon".into(),
                ));
            }
            q.points.push(x);
            q.weights.push(w * det);
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..8 {
            let g = gauss_legendre(n);
            for p in 0..2 * n {
                let s: f64 = g.iter().map(|(x, w)| w * x.powi(p as i32)).sum();
                assert!((s - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn triangle_rules_reach_their_degree() {
        // integral of x^a y^b over the unit right triangle = a! b! / (a+b+2)!
        let fact = |k: u32| (1..=k).map(|i| i as f64).product::<f64>();
        for (order, degree) in [(1, 1), (2, 2), (3, 4), (5, 5), (7, 7), (9, 9)] {
            let tri = [Vec2::zeros(), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
            let q = map_rule(&tri, &triangle_rule(order), order);
            for a in 0..=degree {
                for b in 0..=(degree - a) {
                    let s: f64 = q
                        .points
                        .iter()
                        .zip(&q.weights)
                        .map(|(p, w)| w * p.x.powi(a as i32) * p.y.powi(b as i32))
                        .sum();
                    let exact = fact(a) * fact(b) / fact(a + b + 2);
                    assert!(
                        (s - exact).abs() < 1e-13,
                        "order {order} x^{a} y^{b}: {s} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn unit_square_order_one() {
        let sq = geometry::rectangle(Vec2::zeros(), Vec2::new(1.0, 1.0));
        let q = triangulate_quadrature(&sq, 1).unwrap();
        assert_eq!(q.len(), 4);
        for w in &q.weights {
            assert!((w - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn non_star_polygon_uses_ear_clipping() {
        // comb-shaped polygon whose centroid does not see every edge
        let ring = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(3.0, 0.0),
            Vec2::new(3.0, 3.0),
            Vec2::new(2.0, 3.0),
            Vec2::new(2.0, 0.5),
            Vec2::new(1.0, 0.5),
            Vec2::new(1.0, 3.0),
            Vec2::new(0.0, 3.0),
        ];
        let q = triangulate_quadrature(&ring, 3).unwrap();
        assert!((q.total_weight() - geometry::signed_area(&ring)).abs() < 1e-12);
        assert!(q.weights.iter().all(|&w| w > 0.0));
        assert!(q
            .points
            .iter()
            .all(|p| geometry::point_in_polygon(p, &ring)));
    }

    #[test]
    fn two_level_reproduces_area_on_canonical_images() {
        // affine image of the canonical hexagon: the mean value map is exact
        let ring: Vec<Vec2> = canonical_polygon(6)
            .iter()
            .map(|p| Vec2::new(2.0 * p.x + 0.3 * p.y + 1.0, 0.5 * p.y - 2.0))
            .collect();
        let q = two_level_quadrature(&ring, 3).unwrap();
        assert!((q.total_weight() - geometry::signed_area(&ring)).abs() < 1e-12);
    }
}
