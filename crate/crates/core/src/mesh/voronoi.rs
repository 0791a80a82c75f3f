use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::stitch::mesh_from_polygons;
use super::{Domain, PolyMesh};
use crate::error::{Error, Result};
use crate::geometry::{self, Aabb, Vec2};

/// Upper bound on seeds per mesh; beyond this generation is not practicable on a desk machine.
pub const MAX_SEEDS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiOptions {
    pub n_seeds: usize,
    pub lloyd_iters: usize,
    pub rng_seed: u64,
    /// Boxes kept free of seeds, typically the zone of a later structured refinement.
    pub exclusions: Vec<Aabb>,
}

impl VoronoiOptions {
    pub fn new(n_seeds: usize, rng_seed: u64) -> Self {
        VoronoiOptions {
            n_seeds,
            lloyd_iters: 100,
            rng_seed,
            exclusions: Vec::new(),
        }
    }
}

/// Centroidal Voronoi mesh of `domain`, clipped to its outer boundary with the holes removed.
pub fn generate_voronoi_mesh(domain: &Domain, opts: &VoronoiOptions) -> Result<PolyMesh> {
    let outer_area = geometry::signed_area(&domain.outer);
    if !(outer_area > 0.0) || !(domain.area() > 0.0) {
        return Err(Error::DegenerateDomain(format!(
            "domain area {:e}",
            domain.area()
        )));
    }
    if !is_convex(&domain.outer) {
        return Err(Error::DegenerateDomain(
            "outer boundary must be convex and counter-clockwise".into(),
        ));
    }
    if opts.n_seeds == 0 {
        return Err(Error::InvalidInput("at least one seed is required".into()));
    }
    if opts.n_seeds > MAX_SEEDS {
        return Err(Error::InvalidInput(format!(
            "{} seeds exceed the supported maximum of {MAX_SEEDS}",
            opts.n_seeds
        )));
    }

    let bbox = domain.bbox();
    let scale = bbox.width().max(bbox.height());
    let cutters: Vec<Vec<Vec2>> = domain.holes.iter().map(|h| h.polygon()).collect();
    let admissible = |p: &Vec2| {
        geometry::point_in_polygon(p, &domain.outer)
            && !cutters.iter().any(|c| geometry::point_in_polygon(p, c))
            && !opts.exclusions.iter().any(|b| b.contains(p, 0.0))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let mut seeds = Vec::with_capacity(opts.n_seeds);
    let mut attempts = 0usize;
    while seeds.len() < opts.n_seeds {
        attempts += 1;
        if attempts > 1000 * opts.n_seeds + 10_000 {
            return Err(Error::DegenerateDomain(
                "could not place seeds inside the domain".into(),
            ));
        }
        let p = Vec2::new(
            bbox.min[0] + rng.random::<f64>() * bbox.width(),
            bbox.min[1] + rng.random::<f64>() * bbox.height(),
        );
        if admissible(&p) {
            seeds.push(p);
        }
    }

    let mut cells = clipped_cells(&seeds, domain, &cutters, scale);
    for _ in 0..opts.lloyd_iters {
        let mut moved = 0.0f64;
        for (s, pieces) in seeds.iter_mut().zip(cells.iter()) {
            let mut a = 0.0;
            let mut c = Vec2::zeros();
            for p in pieces {
                let ar = geometry::signed_area(p);
                a += ar;
                c += geometry::centroid(p) * ar;
            }
            if a > 0.0 {
                let next = c / a;
                if admissible(&next) {
                    moved = moved.max((next - *s).norm());
                    *s = next;
                }
            }
        }
        cells = clipped_cells(&seeds, domain, &cutters, scale);
        if moved < 1e-12 * scale {
            break;
        }
    }

    let polys: Vec<Vec<Vec2>> = cells.into_iter().flatten().collect();
    Ok(mesh_from_polygons(polys, domain))
}

fn is_convex(poly: &[Vec2]) -> bool {
    let n = poly.len();
    if n < 3 || geometry::signed_area(poly) <= 0.0 {
        return false;
    }
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        geometry::cross(&(b - a), &(c - b)) >= -1e-14 * (b - a).norm() * (c - b).norm()
    })
}

/// Voronoi cells of `seeds` within the convex outer boundary, minus cutters.
fn clipped_cells(
    seeds: &[Vec2],
    domain: &Domain,
    cutters: &[Vec<Vec2>],
    scale: f64,
) -> Vec<Vec<Vec<Vec2>>> {
    let n = seeds.len();
    let bbox = domain.bbox();
    let h = (bbox.width() * bbox.height() / n as f64)
        .sqrt()
        .max(1e-12 * scale);
    let key = |p: &Vec2| {
        (
            ((p.x - bbox.min[0]) / h).floor() as i64,
            ((p.y - bbox.min[1]) / h).floor() as i64,
        )
    };
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, s) in seeds.iter().enumerate() {
        buckets.entry(key(s)).or_default().push(i);
    }
    let max_ring = ((bbox.width().max(bbox.height()) / h).ceil() as i64) + 2;
    let cutter_boxes: Vec<Aabb> = cutters.iter().map(|c| Aabb::of_points(c.iter())).collect();

    let mut cells = Vec::with_capacity(n);
    for i in 0..n {
        let si = seeds[i];
        let (ki, kj) = key(&si);
        let mut cell = domain.outer.clone();
        let mut ring = 0i64;
        loop {
            let mut cand: Vec<usize> = Vec::new();
            for a in -ring..=ring {
                for b in -ring..=ring {
                    if a.abs() != ring && b.abs() != ring {
                        continue;
                    }
                    if let Some(v) = buckets.get(&(ki + a, kj + b)) {
                        cand.extend(v.iter().copied().filter(|&j| j != i));
                    }
                }
            }
            cand.sort_by(|&x, &y| {
                (seeds[x] - si)
                    .norm_squared()
                    .partial_cmp(&(seeds[y] - si).norm_squared())
                    .unwrap()
                    .then(x.cmp(&y))
            });
            for j in cand {
                let d = seeds[j] - si;
                if d.norm_squared() == 0.0 {
                    // coincident seeds: the lower index owns the cell
                    if j < i {
                        cell.clear();
                    }
                    continue;
                }
                let mid = (si + seeds[j]) * 0.5;
                cell = geometry::clip_halfplane(&cell, &mid, &d);
                if cell.is_empty() {
                    break;
                }
            }
            if cell.is_empty() {
                break;
            }
            let rmax = cell.iter().map(|v| (v - si).norm()).fold(0.0, f64::max);
            if (ring as f64) * h > 2.0 * rmax || ring > max_ring {
                break;
            }
            ring += 1;
        }
        geometry::dedup_ring(&mut cell, 1e-13 * scale);
        let mut pieces = if cell.len() >= 3 {
            vec![cell]
        } else {
            Vec::new()
        };
        for (c, cb) in cutters.iter().zip(cutter_boxes.iter()) {
            let mut next = Vec::new();
            for p in pieces {
                if Aabb::of_points(p.iter()).intersects(cb) {
                    next.extend(geometry::subtract_convex(&p, c));
                } else {
                    next.push(p);
                }
            }
            pieces = next;
        }
        pieces.retain(|p| geometry::signed_area(p) > 1e-14 * scale * scale);
        cells.push(pieces);
    }
    cells
}
