use super::crack::CrackGeometry;
use crate::error::{Error, Result};
use crate::geometry::{self, Vec2};
use crate::mesh::PolyMesh;

/// Below this share of a node's support on one crack side, the node is not
/// Heaviside-enriched (the extra unknown would be nearly singular).
pub const MIN_SIDE_FRACTION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NodeEnrichment {
    pub heaviside: bool,
    pub tip: bool,
}

impl NodeEnrichment {
    pub fn blocks(&self) -> usize {
        1 + self.heaviside as usize + self.tip as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Standard,
    /// Some, not all, ring nodes tip-enriched.
    Blending,
    /// Fully cut by the crack.
    Split,
    /// Contains the crack tip.
    Tip,
}

/// How the crack passes through a split element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutLine {
    pub entry: Vec2,
    pub exit: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnrichmentMap {
    pub crack: Option<CrackGeometry>,
    pub nodes: Vec<NodeEnrichment>,
    /// First global dof of each node.
    pub offsets: Vec<usize>,
    pub n_dofs: usize,
    pub kinds: Vec<ElementKind>,
    /// Cut geometry for split elements, by element.
    pub cuts: Vec<Option<CutLine>>,
    pub tip_element: Option<usize>,
    /// H(X_j) per node (0 when not Heaviside-enriched).
    pub node_h: Vec<f64>,
    /// Branch function value A(X_j) per node (0 when not tip-enriched).
    pub node_a: Vec<f64>,
}

impl EnrichmentMap {
    /// Every node standard.
    pub fn standard(mesh: &PolyMesh) -> Self {
        let nn = mesh.num_nodes();
        EnrichmentMap {
            crack: None,
            nodes: vec![NodeEnrichment::default(); nn],
            offsets: (0..nn).map(|i| 2 * i).collect(),
            n_dofs: 2 * nn,
            kinds: vec![ElementKind::Standard; mesh.num_elements()],
            cuts: vec![None; mesh.num_elements()],
            tip_element: None,
            node_h: vec![0.0; nn],
            node_a: vec![0.0; nn],
        }
    }

    pub fn n_heaviside(&self) -> usize {
        self.nodes.iter().filter(|n| n.heaviside).count()
    }

    pub fn n_tip(&self) -> usize {
        self.nodes.iter().filter(|n| n.tip).count()
    }

    /// Global dofs of node `i`: standard block, then Heaviside, then tip.
    pub fn node_dofs(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i] + 2 * self.nodes[i].blocks()
    }

    pub fn standard_dofs(&self, i: usize) -> [usize; 2] {
        [self.offsets[i], self.offsets[i] + 1]
    }

    pub fn is_enriched_element(&self, e: usize) -> bool {
        self.kinds[e] != ElementKind::Standard
    }
}

/// Crossings of the crack with the element boundary, ordered along the crack.
fn boundary_crossings(ring: &[Vec2], crack: &CrackGeometry, tol: f64) -> Vec<(f64, Vec2)> {
    let n = ring.len();
    let mut pts: Vec<(f64, Vec2)> = Vec::new();
    let mut arc0 = 0.0;
    for (a, b) in crack.segments() {
        let len = (b - a).norm();
        for i in 0..n {
            let (p, q) = (ring[i], ring[(i + 1) % n]);
            if let Some((s, u)) = geometry::segment_intersection(&a, &b, &p, &q) {
                if (-1e-12..=1.0 + 1e-12).contains(&s) && (-1e-12..=1.0 + 1e-12).contains(&u) {
                    let x = a + (b - a) * s;
                    if !pts.iter().any(|(_, y)| (x - y).norm() < tol) {
                        pts.push((arc0 + s * len, x));
                    }
                }
            }
        }
        arc0 += len;
    }
    pts.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    pts
}

/// Areas of the two sides of a polygon cut by the line through `cut`.
pub fn split_polygon(ring: &[Vec2], cut: &CutLine) -> (Vec<Vec2>, Vec<Vec2>) {
    let d = cut.exit - cut.entry;
    let n = Vec2::new(-d.y, d.x);
    // clip_halfplane keeps (x - o) . normal <= 0
    let minus = geometry::clip_halfplane(ring, &cut.entry, &n);
    let plus = geometry::clip_halfplane(ring, &cut.entry, &(-n));
    (plus, minus)
}

/// Classify nodes and elements for the crack and lay out the global dofs.
/// The crack tip is nudged forward when it falls on an element edge or vertex.
pub fn classify(mesh: &PolyMesh, crack: &CrackGeometry) -> Result<EnrichmentMap> {
    let bbox = mesh.bounding_box();
    let scale = bbox.width().max(bbox.height());
    if let Some(region) = &mesh.refined_region {
        let tol = 1e-9 * scale;
        for (a, b) in crack.segments() {
            // sample the crack inside the mesh box
            for k in 0..=16 {
                let p = a + (b - a) * (k as f64 / 16.0);
                if bbox.contains(&p, tol) && !region.contains(&p, tol) {
                    return Err(Error::InvalidInput(format!(
                        "crack point ({:.6}, {:.6}) lies outside the refined zone",
                        p.x, p.y
                    )));
                }
            }
        }
    }

    let mut crack = crack.clone();
    let find_tip = |c: &CrackGeometry| {
        (0..mesh.num_elements()).find(|&e| geometry::point_in_polygon(&c.tip(), &mesh.ring(e)))
    };
    let mut tip_elem = find_tip(&crack).ok_or_else(|| {
        Error::InvalidInput(format!(
            "crack tip ({}, {}) is outside the mesh",
            crack.tip().x,
            crack.tip().y
        ))
    })?;
    for _ in 0..4 {
        let ring = mesh.ring(tip_elem);
        let h = geometry::diameter(&ring);
        if geometry::distance_to_boundary(&crack.tip(), &ring) > 1e-9 * h {
            break;
        }
        let n = crack.vertices.len();
        let t = crack.tangent();
        crack.vertices[n - 1] += t * (1e-6 * h);
        log::warn!(
            "crack tip lies on an element edge; moved forward by {:.3e}",
            1e-6 * h
        );
        tip_elem = find_tip(&crack).ok_or_else(|| {
            Error::InvalidInput("crack tip left the mesh after adjustment".into())
        })?;
    }

    let nn = mesh.num_nodes();
    let ne = mesh.num_elements();
    let mut kinds = vec![ElementKind::Standard; ne];
    let mut cuts = vec![None; ne];
    kinds[tip_elem] = ElementKind::Tip;
    let crack_box = geometry::Aabb::of_points(crack.vertices.iter());
    for e in 0..ne {
        if e == tip_elem {
            continue;
        }
        let ring = mesh.ring(e);
        if !geometry::Aabb::of_points(ring.iter()).intersects(&crack_box.inflate(1e-9 * scale)) {
            continue;
        }
        let h = geometry::diameter(&ring);
        let pts = boundary_crossings(&ring, &crack, 1e-9 * h);
        if pts.len() < 2 {
            continue;
        }
        let (entry, exit) = (pts[0].1, pts[pts.len() - 1].1);
        if (exit - entry).norm() < 1e-9 * h {
            continue;
        }
        let cut = CutLine { entry, exit };
        let (p, m) = split_polygon(&ring, &cut);
        let area = geometry::signed_area(&ring);
        let (ap, am) = (geometry::signed_area(&p), geometry::signed_area(&m));
        // a crack running along an edge does not cut
        if ap > 1e-12 * area && am > 1e-12 * area {
            kinds[e] = ElementKind::Split;
            cuts[e] = Some(cut);
        }
    }

    let mut nodes = vec![NodeEnrichment::default(); nn];
    for &i in &mesh.elements[tip_elem] {
        nodes[i].tip = true;
    }
    // support areas on either side of the crack, per node
    let mut side_area = vec![[0.0f64; 2]; nn];
    let mut touches_split = vec![false; nn];
    for (e, ring_idx) in mesh.elements.iter().enumerate() {
        let ring = mesh.ring(e);
        let (ap, am) = match (&kinds[e], &cuts[e]) {
            (ElementKind::Split, Some(cut)) => {
                let (p, m) = split_polygon(&ring, cut);
                (geometry::signed_area(&p), geometry::signed_area(&m))
            }
            _ => {
                let a = geometry::signed_area(&ring);
                if crack.heaviside(&geometry::centroid(&ring)) > 0.0 {
                    (a, 0.0)
                } else {
                    (0.0, a)
                }
            }
        };
        for &i in ring_idx {
            side_area[i][0] += ap;
            side_area[i][1] += am;
            if kinds[e] == ElementKind::Split {
                touches_split[i] = true;
            }
        }
    }
    for i in 0..nn {
        if touches_split[i] && !nodes[i].tip {
            let [ap, am] = side_area[i];
            if ap.min(am) > MIN_SIDE_FRACTION * (ap + am) {
                nodes[i].heaviside = true;
            }
        }
    }
    for (e, ring) in mesh.elements.iter().enumerate() {
        if kinds[e] == ElementKind::Standard {
            let ntip = ring.iter().filter(|&&i| nodes[i].tip).count();
            if ntip > 0 && ntip < ring.len() {
                kinds[e] = ElementKind::Blending;
            }
        }
    }

    let mut offsets = Vec::with_capacity(nn);
    let mut next = 0;
    let mut node_h = vec![0.0; nn];
    let mut node_a = vec![0.0; nn];
    for i in 0..nn {
        offsets.push(next);
        next += 2 * nodes[i].blocks();
        let x = mesh.nodes[i];
        if nodes[i].heaviside {
            node_h[i] = crack.heaviside(&x);
        }
        if nodes[i].tip {
            node_a[i] = crack.tip_branch(&x)?.0;
        }
    }
    Ok(EnrichmentMap {
        crack: Some(crack),
        nodes,
        offsets,
        n_dofs: next,
        kinds,
        cuts,
        tip_element: Some(tip_elem),
        node_h,
        node_a,
    })
}
