use std::collections::BTreeMap;

use super::stitch::{absorb_hanging_nodes, merge_coincident_nodes, tag_boundary};
use super::{BoundarySet, Domain, PolyMesh};
use crate::enrichment::CrackGeometry;
use crate::error::{Error, Result};
use crate::geometry::{self, Aabb, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementSpec {
    pub region: Aabb,
    /// Target quad edge length [mm].
    pub cell_size: f64,
}

impl RefinementSpec {
    /// Crack bounding box inflated by `margin_cells` cells on every side.
    pub fn around_crack(crack: &CrackGeometry, cell_size: f64, margin_cells: f64) -> Self {
        let b = Aabb::of_points(crack.vertices.iter());
        RefinementSpec {
            region: b.inflate(margin_cells * cell_size),
            cell_size,
        }
    }
}

/// Replace the part of `mesh` inside `spec.region` by a structured quad grid.
/// Polygons straddling the region boundary keep their outside part and absorb
/// the grid nodes on their edges as ring vertices (and vice versa).
pub fn embed_structured_refinement(
    mesh: &PolyMesh,
    spec: &RefinementSpec,
    crack: &CrackGeometry,
) -> Result<PolyMesh> {
    if !(spec.cell_size > 0.0) {
        return Err(Error::InvalidInput(format!(
            "cell size must be positive, got {}",
            spec.cell_size
        )));
    }
    let bbox = mesh.bounding_box();
    let scale = bbox.width().max(bbox.height());
    let tol = 1e-9 * scale;
    let region = spec.region.intersection(&bbox);
    if region.width() <= tol || region.height() <= tol {
        return Ok(mesh.clone());
    }
    let touched: Vec<usize> = (0..mesh.num_elements())
        .filter(|&e| {
            let ring = mesh.ring(e);
            Aabb::of_points(ring.iter()).intersects(&region)
                && !geometry::clip_convex(&ring, &region.polygon()).is_empty()
                && geometry::signed_area(&geometry::clip_convex(&ring, &region.polygon()))
                    > tol * tol
        })
        .collect();
    if touched.is_empty() {
        return Ok(mesh.clone());
    }

    // crack (inside the mesh) must sit in the region with a two-cell margin
    let cb = Aabb::of_points(crack.vertices.iter())
        .inflate(2.0 * spec.cell_size)
        .intersection(&bbox);
    if !region.contains_box(&cb, tol) {
        return Err(Error::InvalidInput(format!(
            "refinement region {:?}-{:?} does not cover the crack with a margin of two cells",
            region.min, region.max
        )));
    }
    let largest = touched
        .iter()
        .map(|&e| geometry::diameter(&mesh.ring(e)))
        .fold(0.0, f64::max);
    if spec.cell_size > largest {
        return Err(Error::InvalidInput(format!(
            "cell size {} exceeds the size of the polygons it replaces ({largest})",
            spec.cell_size
        )));
    }

    // cutter pushed outward where it meets the mesh bounding box
    let mut cut = region;
    let ext = scale;
    if cut.min[0] <= bbox.min[0] + tol {
        cut.min[0] -= ext;
    }
    if cut.min[1] <= bbox.min[1] + tol {
        cut.min[1] -= ext;
    }
    if cut.max[0] >= bbox.max[0] - tol {
        cut.max[0] += ext;
    }
    if cut.max[1] >= bbox.max[1] - tol {
        cut.max[1] += ext;
    }
    let cutter = cut.polygon();

    let mut polys: Vec<Vec<Vec2>> = Vec::new();
    for e in 0..mesh.num_elements() {
        let ring = mesh.ring(e);
        if touched.binary_search(&e).is_ok() {
            polys.extend(geometry::subtract_convex(&ring, &cutter));
        } else {
            polys.push(ring);
        }
    }
    let nx = ((region.width() / spec.cell_size).round() as usize).max(1);
    let ny = ((region.height() / spec.cell_size).round() as usize).max(1);
    let dx = region.width() / nx as f64;
    let dy = region.height() / ny as f64;
    let owners: Vec<Vec<Vec2>> = touched.iter().map(|&e| mesh.ring(e)).collect();
    for j in 0..ny {
        for i in 0..nx {
            let lo = Vec2::new(region.min[0] + i as f64 * dx, region.min[1] + j as f64 * dy);
            let hi = Vec2::new(
                if i + 1 == nx {
                    region.max[0]
                } else {
                    region.min[0] + (i + 1) as f64 * dx
                },
                if j + 1 == ny {
                    region.max[1]
                } else {
                    region.min[1] + (j + 1) as f64 * dy
                },
            );
            let c = (lo + hi) * 0.5;
            if owners.iter().any(|r| geometry::point_in_polygon(&c, r)) {
                polys.push(geometry::rectangle(lo, hi));
            }
        }
    }

    let mut out = PolyMesh::default();
    for p in polys {
        let base = out.nodes.len();
        out.elements.push((base..base + p.len()).collect());
        out.nodes.extend(p);
    }
    merge_coincident_nodes(&mut out, tol);
    absorb_hanging_nodes(&mut out, tol);
    out.compact();
    retag_from(&mut out, mesh, 1e-7 * scale);
    out.refined_region = Some(region);
    Ok(out)
}

/// Give each boundary edge of `mesh` the name of the old boundary set whose geometry contains it.
fn retag_from(mesh: &mut PolyMesh, old: &PolyMesh, tol: f64) {
    let mut segs: Vec<(String, Vec2, Vec2)> = Vec::new();
    for (name, set) in &old.boundary_sets {
        if let BoundarySet::Edges(es) = set {
            for e in es {
                segs.push((name.clone(), old.nodes[e[0]], old.nodes[e[1]]));
            }
        }
    }
    let mut sets: BTreeMap<String, Vec<[usize; 2]>> = BTreeMap::new();
    for [a, b] in mesh.boundary_edges() {
        let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
        let name = segs
            .iter()
            .find(|(_, s0, s1)| {
                geometry::distance_to_segment(&pa, s0, s1).0 < tol
                    && geometry::distance_to_segment(&pb, s0, s1).0 < tol
            })
            .map(|s| s.0.clone())
            .unwrap_or_else(|| "boundary".to_string());
        sets.entry(name).or_default().push([a, b]);
    }
    mesh.boundary_sets = sets
        .into_iter()
        .map(|(k, v)| (k, BoundarySet::Edges(v)))
        .collect();
    for (name, set) in &old.boundary_sets {
        if let BoundarySet::Nodes(ns) = set {
            let ids: Vec<usize> = ns
                .iter()
                .map(|&i| mesh.nearest_node(&old.nodes[i]))
                .filter(|&k| {
                    ns.iter()
                        .any(|&i| (mesh.nodes[k] - old.nodes[i]).norm() < tol)
                })
                .collect();
            mesh.boundary_sets
                .insert(name.clone(), BoundarySet::Nodes(ids));
        }
    }
}

/// Structured `nx` x `ny` quadrilateral grid over the domain's bounding box,
/// clipped to the outer boundary with holes removed (cut cells become polygons).
pub fn structured_quad_mesh(domain: &Domain, nx: usize, ny: usize) -> Result<PolyMesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidInput(
            "grid needs at least one cell per direction".into(),
        ));
    }
    if !(domain.area() > 0.0) {
        return Err(Error::DegenerateDomain(format!(
            "domain area {:e}",
            domain.area()
        )));
    }
    let b = domain.bbox();
    let scale = b.width().max(b.height());
    let holes: Vec<Vec<Vec2>> = domain.holes.iter().map(|h| h.polygon()).collect();
    let mut polys = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let lo = Vec2::new(
                b.min[0] + b.width() * i as f64 / nx as f64,
                b.min[1] + b.height() * j as f64 / ny as f64,
            );
            let hi = Vec2::new(
                b.min[0] + b.width() * (i + 1) as f64 / nx as f64,
                b.min[1] + b.height() * (j + 1) as f64 / ny as f64,
            );
            let cell = geometry::clip_convex(&geometry::rectangle(lo, hi), &domain.outer);
            if cell.len() < 3 {
                continue;
            }
            let mut pieces = vec![cell];
            for h in &holes {
                pieces = pieces
                    .into_iter()
                    .flat_map(|p| geometry::subtract_convex(&p, h))
                    .collect();
            }
            polys.extend(
                pieces
                    .into_iter()
                    .filter(|p| geometry::signed_area(p) > 1e-14 * scale * scale),
            );
        }
    }
    let mut mesh = PolyMesh::default();
    for p in polys {
        let base = mesh.nodes.len();
        mesh.elements.push((base..base + p.len()).collect());
        mesh.nodes.extend(p);
    }
    let tol = 1e-9 * scale;
    merge_coincident_nodes(&mut mesh, tol);
    absorb_hanging_nodes(&mut mesh, tol);
    mesh.compact();
    tag_boundary(&mut mesh, domain);
    Ok(mesh)
}
