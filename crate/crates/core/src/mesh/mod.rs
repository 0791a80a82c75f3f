//! Polygonal meshes: Voronoi generation, structured crack-zone refinement with
//! hanging nodes absorbed into polygon rings, and the text mesh format.

mod domain;
pub mod io;
mod refine;
mod stitch;
mod voronoi;

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::geometry::{self, Aabb, Vec2};

pub use domain::{Domain, Hole};
pub use refine::{embed_structured_refinement, structured_quad_mesh, RefinementSpec};
pub use stitch::{absorb_hanging_nodes, merge_coincident_nodes};
pub use voronoi::{generate_voronoi_mesh, VoronoiOptions};

/// A named group of boundary entities used for boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySet {
    Nodes(Vec<usize>),
    Edges(Vec<[usize; 2]>),
}

impl BoundarySet {
    pub fn nodes(&self) -> Vec<usize> {
        match self {
            BoundarySet::Nodes(n) => n.clone(),
            BoundarySet::Edges(e) => {
                let mut n: Vec<usize> = e.iter().flat_map(|e| e.iter().copied()).collect();
                n.sort_unstable();
                n.dedup();
                n
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolyMesh {
    /// Undeformed nodal coordinates [mm].
    pub nodes: Vec<Vec2>,
    /// Counter-clockwise vertex rings.
    pub elements: Vec<Vec<usize>>,
    pub boundary_sets: BTreeMap<String, BoundarySet>,
    pub refined_region: Option<Aabb>,
}

impl PolyMesh {
    pub fn ring(&self, e: usize) -> Vec<Vec2> {
        self.elements[e].iter().map(|&i| self.nodes[i]).collect()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn element_area(&self, e: usize) -> f64 {
        geometry::signed_area(&self.ring(e))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.elements.len()).map(|e| self.element_area(e)).sum()
    }

    pub fn bounding_box(&self) -> Aabb {
        Aabb::of_points(self.nodes.iter())
    }

    /// Edge -> adjacent elements.
    pub fn edge_map(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (e, ring) in self.elements.iter().enumerate() {
            for k in 0..ring.len() {
                let a = ring[k];
                let b = ring[(k + 1) % ring.len()];
                map.entry((a.min(b), a.max(b))).or_default().push(e);
            }
        }
        map
    }

    /// Boundary edges oriented as in their owning ring, in deterministic order.
    pub fn boundary_edges(&self) -> Vec<[usize; 2]> {
        let map = self.edge_map();
        let mut out = Vec::new();
        for ring in &self.elements {
            for k in 0..ring.len() {
                let a = ring[k];
                let b = ring[(k + 1) % ring.len()];
                if map[&(a.min(b), a.max(b))].len() == 1 {
                    out.push([a, b]);
                }
            }
        }
        out
    }

    /// Node -> elements containing it.
    pub fn node_elements(&self) -> Vec<Vec<usize>> {
        let mut ne = vec![Vec::new(); self.nodes.len()];
        for (e, ring) in self.elements.iter().enumerate() {
            for &i in ring {
                ne[i].push(e);
            }
        }
        ne
    }

    pub fn set_nodes(&self, name: &str) -> Result<Vec<usize>> {
        self.boundary_sets
            .get(name)
            .map(BoundarySet::nodes)
            .ok_or_else(|| Error::InvalidInput(format!("unknown boundary set '{name}'")))
    }

    pub fn set_edges(&self, name: &str) -> Result<Vec<[usize; 2]>> {
        match self.boundary_sets.get(name) {
            Some(BoundarySet::Edges(e)) => Ok(e.clone()),
            Some(BoundarySet::Nodes(_)) => Err(Error::InvalidInput(format!(
                "boundary set '{name}' holds nodes, not edges"
            ))),
            None => Err(Error::InvalidInput(format!(
                "unknown boundary set '{name}'"
            ))),
        }
    }

    pub fn nearest_node(&self, p: &Vec2) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, x) in self.nodes.iter().enumerate() {
            let d = (x - p).norm_squared();
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    /// Smallest element size around the crack zone or, without one, the mean element size.
    pub fn characteristic_size(&self) -> f64 {
        let n = self.elements.len().max(1) as f64;
        (self.total_area() / n).sqrt()
    }

    /// Check the structural invariants: rings are simple, counter-clockwise with
    /// positive area, indices in range, and each edge has at most two owners.
    pub fn validate(&self) -> Result<()> {
        let nn = self.nodes.len();
        let scale = self
            .bounding_box()
            .width()
            .max(self.bounding_box().height());
        for (e, ring) in self.elements.iter().enumerate() {
            if ring.len() < 3 {
                return Err(Error::InvalidMesh(format!(
                    "element {e} has {} vertices",
                    ring.len()
                )));
            }
            for k in 0..ring.len() {
                let a = ring[k];
                let b = ring[(k + 1) % ring.len()];
                if a >= nn {
                    return Err(Error::InvalidMesh(format!(
                        "element {e} references node {a} of {nn}"
                    )));
                }
                if a == b {
                    return Err(Error::InvalidMesh(format!("element {e} repeats node {a}")));
                }
            }
            let pts = self.ring(e);
            let area = geometry::signed_area(&pts);
            if area <= 1e-14 * scale * scale {
                return Err(Error::InvalidMesh(format!(
                    "element {e} has non-positive area {area:e}"
                )));
            }
            if !ring_is_simple(&pts) {
                return Err(Error::InvalidMesh(format!(
                    "element {e} is self-intersecting"
                )));
            }
        }
        for (edge, owners) in self.edge_map() {
            if owners.len() > 2 {
                return Err(Error::InvalidMesh(format!(
                    "edge ({}, {}) shared by {} elements",
                    edge.0,
                    edge.1,
                    owners.len()
                )));
            }
        }
        Ok(())
    }

    /// Nodes lying in the interior of an element edge they are not a vertex of.
    pub fn hanging_nodes(&self, tol: f64) -> Vec<usize> {
        let mut out = Vec::new();
        for ring in &self.elements {
            for k in 0..ring.len() {
                let a = self.nodes[ring[k]];
                let b = self.nodes[ring[(k + 1) % ring.len()]];
                for (i, p) in self.nodes.iter().enumerate() {
                    if i == ring[k] || i == ring[(k + 1) % ring.len()] {
                        continue;
                    }
                    let (d, t) = geometry::distance_to_segment(p, &a, &b);
                    if d < tol && t > 0.0 && t < 1.0 {
                        out.push(i);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Remove nodes not referenced by any element and renumber.
    pub fn compact(&mut self) {
        let mut used = vec![false; self.nodes.len()];
        for ring in &self.elements {
            for &i in ring {
                used[i] = true;
            }
        }
        let mut map = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, &u) in used.iter().enumerate() {
            if u {
                map[i] = nodes.len();
                nodes.push(self.nodes[i]);
            }
        }
        for ring in &mut self.elements {
            for i in ring.iter_mut() {
                *i = map[*i];
            }
        }
        for set in self.boundary_sets.values_mut() {
            match set {
                BoundarySet::Nodes(n) => {
                    n.retain(|&i| map[i] != usize::MAX);
                    n.iter_mut().for_each(|i| *i = map[*i]);
                }
                BoundarySet::Edges(es) => {
                    es.retain(|e| map[e[0]] != usize::MAX && map[e[1]] != usize::MAX);
                    es.iter_mut().for_each(|e| *e = [map[e[0]], map[e[1]]]);
                }
            }
        }
        self.nodes = nodes;
    }
}

fn ring_is_simple(pts: &[Vec2]) -> bool {
    let n = pts.len();
    if n <= 3 {
        return true;
    }
    for i in 0..n {
        let a0 = pts[i];
        let a1 = pts[(i + 1) % n];
        for j in i + 2..n {
            if (j + 1) % n == i {
                continue;
            }
            let b0 = pts[j];
            let b1 = pts[(j + 1) % n];
            if let Some((t, u)) = geometry::segment_intersection(&a0, &a1, &b0, &b1) {
                if t > 1e-12 && t < 1.0 - 1e-12 && u > 1e-12 && u < 1.0 - 1e-12 {
                    return false;
                }
            }
        }
    }
    true
}

/// Maximum vertex-pair distance of an element ring.
pub fn element_diameter(mesh: &PolyMesh, elem: usize) -> Result<f64> {
    if elem >= mesh.elements.len() {
        return Err(Error::InvalidInput(format!(
            "element index {elem} out of range"
        )));
    }
    Ok(geometry::diameter(&mesh.ring(elem)))
}
