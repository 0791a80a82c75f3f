use std::collections::{BTreeMap, HashMap};

use super::{BoundarySet, Domain, PolyMesh};
use crate::geometry::{self, Aabb, Vec2};

/// Uniform bucket grid over points.
struct PointGrid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl PointGrid {
    fn new(cell: f64) -> Self {
        PointGrid {
            cell,
            buckets: HashMap::new(),
        }
    }

    fn key(&self, p: &Vec2) -> (i64, i64) {
        (
            (p.x / self.cell).floor() as i64,
            (p.y / self.cell).floor() as i64,
        )
    }

    fn insert(&mut self, p: &Vec2, id: usize) {
        let k = self.key(p);
        self.buckets.entry(k).or_default().push(id);
    }

    fn query_box(&self, b: &Aabb) -> Vec<usize> {
        let (i0, j0) = self.key(&Vec2::new(b.min[0], b.min[1]));
        let (i1, j1) = self.key(&Vec2::new(b.max[0], b.max[1]));
        let mut out = Vec::new();
        for i in i0..=i1 {
            for j in j0..=j1 {
                if let Some(v) = self.buckets.get(&(i, j)) {
                    out.extend_from_slice(v);
                }
            }
        }
        out
    }
}

/// Merge nodes closer than `tol`, rewrite rings, drop collapsed rings.
/// Keeps the first node of each cluster, so the result is order-deterministic.
pub fn merge_coincident_nodes(mesh: &mut PolyMesh, tol: f64) {
    let mut grid = PointGrid::new(4.0 * tol.max(1e-300));
    let mut map = vec![0usize; mesh.nodes.len()];
    let mut kept: Vec<Vec2> = Vec::new();
    for (i, p) in mesh.nodes.iter().enumerate() {
        let cand = grid.query_box(&Aabb::new([p.x - tol, p.y - tol], [p.x + tol, p.y + tol]));
        let hit = cand
            .into_iter()
            .filter(|&k| (kept[k] - p).norm() <= tol)
            .min();
        map[i] = match hit {
            Some(k) => k,
            None => {
                let k = kept.len();
                kept.push(*p);
                grid.insert(p, k);
                k
            }
        };
    }
    mesh.nodes = kept;
    for ring in &mut mesh.elements {
        for i in ring.iter_mut() {
            *i = map[*i];
        }
        ring.dedup();
        while ring.len() > 1 && ring[0] == ring[ring.len() - 1] {
            ring.pop();
        }
    }
    mesh.elements.retain(|r| r.len() >= 3);
}

/// Insert every node lying in the interior of an element edge into that ring,
/// ordered by arclength, so no true hanging node remains.
pub fn absorb_hanging_nodes(mesh: &mut PolyMesh, tol: f64) -> usize {
    let n_edges: usize = mesh.elements.iter().map(|r| r.len()).sum();
    if n_edges == 0 {
        return 0;
    }
    let mean_len = mesh
        .elements
        .iter()
        .flat_map(|r| (0..r.len()).map(move |k| (r[k], r[(k + 1) % r.len()])))
        .map(|(a, b)| (mesh.nodes[a] - mesh.nodes[b]).norm())
        .sum::<f64>()
        / n_edges as f64;
    let mut grid = PointGrid::new(mean_len.max(tol * 10.0));
    for (i, p) in mesh.nodes.iter().enumerate() {
        grid.insert(p, i);
    }
    let mut inserted = 0;
    for ring in mesh.elements.iter_mut() {
        let mut out = Vec::with_capacity(ring.len() + 4);
        for k in 0..ring.len() {
            let ia = ring[k];
            let ib = ring[(k + 1) % ring.len()];
            let a = mesh.nodes[ia];
            let b = mesh.nodes[ib];
            out.push(ia);
            let bb = Aabb::of_points([a, b].iter()).inflate(tol);
            let mut on_edge: Vec<(f64, usize)> = grid
                .query_box(&bb)
                .into_iter()
                .filter(|&c| c != ia && c != ib)
                .filter_map(|c| {
                    let (d, t) = geometry::distance_to_segment(&mesh.nodes[c], &a, &b);
                    let len = (b - a).norm();
                    (d <= tol && t * len > tol && (1.0 - t) * len > tol).then_some((t, c))
                })
                .collect();
            on_edge.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
            on_edge.dedup_by_key(|x| x.1);
            inserted += on_edge.len();
            out.extend(on_edge.into_iter().map(|x| x.1));
        }
        *ring = out;
    }
    inserted
}

/// Assemble a conforming mesh from loose polygons: merge shared vertices,
/// absorb hanging nodes and tag the domain boundary.
pub(crate) fn mesh_from_polygons(polys: Vec<Vec<Vec2>>, domain: &Domain) -> PolyMesh {
    let scale = {
        let b = domain.bbox();
        b.width().max(b.height())
    };
    let tol = 1e-9 * scale;
    let mut mesh = PolyMesh::default();
    for p in polys {
        let base = mesh.nodes.len();
        mesh.elements.push((base..base + p.len()).collect());
        mesh.nodes.extend(p);
    }
    merge_coincident_nodes(&mut mesh, tol);
    absorb_hanging_nodes(&mut mesh, tol);
    mesh.elements.retain(|r| r.len() >= 3);
    mesh.compact();
    tag_boundary(&mut mesh, domain);
    mesh
}

/// Sort boundary edges into named sets: outer sides and holes.
pub(crate) fn tag_boundary(mesh: &mut PolyMesh, domain: &Domain) {
    let scale = {
        let b = domain.bbox();
        b.width().max(b.height())
    };
    let tol = 1e-7 * scale;
    let names = domain.side_names();
    let holes: Vec<Vec<Vec2>> = domain.holes.iter().map(|h| h.polygon()).collect();
    let mut sets: BTreeMap<String, Vec<[usize; 2]>> = BTreeMap::new();
    for [a, b] in mesh.boundary_edges() {
        let pa = mesh.nodes[a];
        let pb = mesh.nodes[b];
        let m = (pa + pb) * 0.5;
        let mut name = None;
        let n = domain.outer.len();
        for k in 0..n {
            let (q0, q1) = (domain.outer[k], domain.outer[(k + 1) % n]);
            if geometry::distance_to_segment(&pa, &q0, &q1).0 < tol
                && geometry::distance_to_segment(&pb, &q0, &q1).0 < tol
            {
                name = Some(names[k].clone());
                break;
            }
        }
        if name.is_none() {
            for (k, h) in holes.iter().enumerate() {
                if geometry::distance_to_boundary(&m, h) < tol {
                    name = Some(format!("hole{k}"));
                    break;
                }
            }
        }
        let name = name.unwrap_or_else(|| "boundary".to_string());
        sets.entry(name).or_default().push([a, b]);
    }
    mesh.boundary_sets = sets
        .into_iter()
        .map(|(k, v)| (k, BoundarySet::Edges(v)))
        .collect();
    // corner nodes of the outer boundary, for point supports
    let corner_names = if names[0] == "bottom" {
        ["bottom_left", "bottom_right", "top_right", "top_left"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        (0..domain.outer.len())
            .map(|k| format!("corner{k}"))
            .collect::<Vec<_>>()
    };
    for (k, c) in domain.outer.iter().enumerate() {
        let i = mesh.nearest_node(c);
        if (mesh.nodes[i] - c).norm() < tol {
            mesh.boundary_sets
                .insert(corner_names[k].clone(), BoundarySet::Nodes(vec![i]));
        }
    }
}
