use crate::error::{Error, Result};
use crate::geometry::{self, Vec2};

/// Piecewise-linear crack in undeformed coordinates. The last vertex is the tip.
#[derive(Debug, Clone, PartialEq)]
pub struct CrackGeometry {
    pub vertices: Vec<Vec2>,
}

/// Closest point on the crack polyline.
#[derive(Debug, Clone, Copy)]
pub struct ClosestPoint {
    pub point: Vec2,
    pub distance: f64,
    pub segment: usize,
    /// Parameter along the segment, in [0, 1].
    pub t: f64,
}

impl CrackGeometry {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidInput(
                "a crack needs at least two vertices".into(),
            ));
        }
        for w in vertices.windows(2) {
            if !((w[1] - w[0]).norm() > 0.0) {
                return Err(Error::InvalidInput(
                    "crack has a zero-length segment".into(),
                ));
            }
        }
        Ok(CrackGeometry { vertices })
    }

    pub fn tip(&self) -> Vec2 {
        *self.vertices.last().unwrap()
    }

    /// Unit tangent of the last segment, pointing out of the crack.
    pub fn tangent(&self) -> Vec2 {
        let n = self.vertices.len();
        (self.vertices[n - 1] - self.vertices[n - 2]).normalize()
    }

    /// Unit normal, tangent rotated by +90 degrees.
    pub fn normal(&self) -> Vec2 {
        let t = self.tangent();
        Vec2::new(-t.y, t.x)
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn closest_point(&self, x: &Vec2) -> ClosestPoint {
        let mut best = ClosestPoint {
            point: self.vertices[0],
            distance: f64::INFINITY,
            segment: 0,
            t: 0.0,
        };
        for (k, (a, b)) in self.segments().enumerate() {
            let (d, t) = geometry::distance_to_segment(x, &a, &b);
            if d < best.distance {
                best = ClosestPoint {
                    point: a + (b - a) * t,
                    distance: d,
                    segment: k,
                    t,
                };
            }
        }
        best
    }

    /// Normal of segment `k`.
    fn segment_normal(&self, k: usize) -> Vec2 {
        let t = (self.vertices[k + 1] - self.vertices[k]).normalize();
        Vec2::new(-t.y, t.x)
    }

    pub fn distance(&self, x: &Vec2) -> f64 {
        self.closest_point(x).distance
    }

    /// Point at arclength `s` from the first vertex, with the left normal of its segment.
    pub fn point_at(&self, s: f64) -> Option<(Vec2, Vec2)> {
        let mut acc = 0.0;
        for (a, b) in self.segments() {
            let len = (b - a).norm();
            if s <= acc + len {
                let d = (b - a) / len;
                return Some((a + d * (s - acc).max(0.0), Vec2::new(-d.y, d.x)));
            }
            acc += len;
        }
        None
    }

    /// Signed distance: positive on the normal side of the closest segment.
    pub fn signed_distance(&self, x: &Vec2) -> f64 {
        let cp = self.closest_point(x);
        let d = x - cp.point;
        let n = if cp.t > 0.0 && cp.t < 1.0 {
            self.segment_normal(cp.segment)
        } else if cp.t <= 0.0 && cp.segment > 0 {
            // at an interior kink, average the adjacent normals
            (self.segment_normal(cp.segment - 1) + self.segment_normal(cp.segment)).normalize()
        } else if cp.t >= 1.0 && cp.segment + 1 < self.vertices.len() - 1 {
            (self.segment_normal(cp.segment) + self.segment_normal(cp.segment + 1)).normalize()
        } else {
            self.segment_normal(cp.segment)
        };
        if d.dot(&n) >= 0.0 {
            cp.distance
        } else {
            -cp.distance
        }
    }

    /// Step function: +1 on the normal side, -1 on the other. Points exactly on the
    /// crack count as the positive side.
    pub fn heaviside(&self, x: &Vec2) -> f64 {
        if self.signed_distance(x) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Tip-local polar coordinates (r, theta), theta in (-pi, pi] from the tip tangent.
    pub fn tip_polar(&self, x: &Vec2) -> (f64, f64) {
        let d = x - self.tip();
        let t = self.tangent();
        let n = self.normal();
        let x1 = d.dot(&t);
        let x2 = d.dot(&n);
        let r = (x1 * x1 + x2 * x2).sqrt();
        let mut th = x2.atan2(x1);
        if th <= -std::f64::consts::PI {
            th = std::f64::consts::PI;
        }
        (r, th)
    }

    /// Branch function sqrt(r) sin(theta/2) and its gradient in global undeformed coordinates.
    pub fn tip_branch(&self, x: &Vec2) -> Result<(f64, Vec2)> {
        let (r, th) = self.tip_polar(x);
        if !(r > 0.0) {
            return Err(Error::InvalidInput(
                "branch function gradient is unbounded at the crack tip".into(),
            ));
        }
        Ok(tip_branch_polar(r, th, &self.tangent()))
    }

    /// Does segment (p, q) cross the crack polyline?
    pub fn crosses(&self, p: &Vec2, q: &Vec2) -> bool {
        self.segments().any(|(a, b)| {
            geometry::segment_intersection(p, q, &a, &b)
                .map(|(s, u)| (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&u))
                .unwrap_or(false)
        })
    }
}

/// Branch function in polar form, gradient rotated from the tip frame with tangent `t`.
pub fn tip_branch_polar(r: f64, th: f64, t: &Vec2) -> (f64, Vec2) {
    let sr = r.sqrt();
    let (s, c) = (0.5 * th).sin_cos();
    let a = sr * s;
    // in the tip frame
    let d1 = -s / (2.0 * sr);
    let d2 = c / (2.0 * sr);
    let n = Vec2::new(-t.y, t.x);
    (a, t * d1 + n * d2)
}
