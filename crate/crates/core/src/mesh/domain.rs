use crate::geometry::{self, Aabb, Vec2};

/// Number of segments used to polygonize circular holes.
pub const CIRCLE_SEGMENTS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum Hole {
    Circle {
        center: Vec2,
        radius: f64,
    },
    /// Convex, counter-clockwise.
    Polygon(Vec<Vec2>),
}

impl Hole {
    pub fn polygon(&self) -> Vec<Vec2> {
        match self {
            Hole::Circle { center, radius } => {
                geometry::circle_polygon(*center, *radius, CIRCLE_SEGMENTS)
            }
            Hole::Polygon(p) => p.clone(),
        }
    }
}

/// Meshing domain: a convex outer boundary minus convex holes.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub outer: Vec<Vec2>,
    pub holes: Vec<Hole>,
}

impl Domain {
    pub fn rectangle(min: Vec2, max: Vec2) -> Self {
        Domain {
            outer: geometry::rectangle(min, max),
            holes: Vec::new(),
        }
    }

    pub fn with_hole(mut self, hole: Hole) -> Self {
        self.holes.push(hole);
        self
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::of_points(self.outer.iter())
    }

    pub fn area(&self) -> f64 {
        geometry::signed_area(&self.outer)
            - self
                .holes
                .iter()
                .map(|h| geometry::signed_area(&h.polygon()))
                .sum::<f64>()
    }

    pub fn contains(&self, p: &Vec2) -> bool {
        geometry::point_in_polygon(p, &self.outer)
            && !self
                .holes
                .iter()
                .any(|h| geometry::point_in_polygon(p, &h.polygon()))
    }

    fn is_axis_rectangle(&self) -> bool {
        if self.outer.len() != 4 {
            return false;
        }
        let b = self.bbox();
        let r = b.polygon();
        self.outer
            .iter()
            .zip(r.iter())
            .all(|(a, b)| (a - b).norm() < 1e-12 * (1.0 + b.norm()))
    }

    /// Names of the outer sides, in ring order.
    pub fn side_names(&self) -> Vec<String> {
        if self.is_axis_rectangle() {
            ["bottom", "right", "top", "left"]
                .iter()
                .map(|s| s.to_string())
                .collect()
        } else {
            (0..self.outer.len()).map(|k| format!("side{k}")).collect()
        }
    }
}
