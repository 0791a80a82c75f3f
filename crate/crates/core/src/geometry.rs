//! Planar polygon utilities shared by the mesher, the basis and the crack code.

use nalgebra::Vector2;

pub type Vec2 = Vector2<f64>;

#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Shoelace area, positive for counter-clockwise rings.
pub fn signed_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    let mut a = 0.0;
    for i in 0..n {
        a += cross(&poly[i], &poly[(i + 1) % n]);
    }
    0.5 * a
}

/// Area centroid. Falls back to the vertex average for degenerate rings.
pub fn centroid(poly: &[Vec2]) -> Vec2 {
    let n = poly.len();
    // shift to the first vertex to limit cancellation
    let o = poly[0];
    let mut a = 0.0;
    let mut c = Vec2::zeros();
    for i in 0..n {
        let p = poly[i] - o;
        let q = poly[(i + 1) % n] - o;
        let w = cross(&p, &q);
        a += w;
        c += (p + q) * w;
    }
    if a.abs() < f64::MIN_POSITIVE * 1e10 {
        return poly.iter().fold(Vec2::zeros(), |s, p| s + p) / n as f64;
    }
    o + c / (3.0 * a)
}

pub fn diameter(poly: &[Vec2]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..poly.len() {
        for j in i + 1..poly.len() {
            d = d.max((poly[i] - poly[j]).norm());
        }
    }
    d
}

/// Even-odd point-in-polygon test. Points on the boundary may go either way.
pub fn point_in_polygon(p: &Vec2, poly: &[Vec2]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn distance_to_segment(p: &Vec2, a: &Vec2, b: &Vec2) -> (f64, f64) {
    let d = b - a;
    let l2 = d.norm_squared();
    let t = if l2 > 0.0 {
        ((p - a).dot(&d) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ((a + d * t - p).norm(), t)
}

/// Distance from `p` to the closed boundary of `poly`.
pub fn distance_to_boundary(p: &Vec2, poly: &[Vec2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| distance_to_segment(p, &poly[i], &poly[(i + 1) % n]).0)
        .fold(f64::INFINITY, f64::min)
}

/// Parameters `(t, u)` of the proper intersection of segments `p0p1` and `q0q1`.
pub fn segment_intersection(p0: &Vec2, p1: &Vec2, q0: &Vec2, q1: &Vec2) -> Option<(f64, f64)> {
    let r = p1 - p0;
    let s = q1 - q0;
    let den = cross(&r, &s);
    if den.abs() <= 1e-300 {
        return None;
    }
    let qp = q0 - p0;
    let t = cross(&qp, &s) / den;
    let u = cross(&qp, &r) / den;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((t, u))
    } else {
        None
    }
}

/// Sutherland-Hodgman clip keeping the side where `(x - origin) . normal <= 0`.
pub fn clip_halfplane(poly: &[Vec2], origin: &Vec2, normal: &Vec2) -> Vec<Vec2> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    if n == 0 {
        return out;
    }
    let side = |p: &Vec2| (p - origin).dot(normal);
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let (sa, sb) = (side(&a), side(&b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa <= 0.0) != (sb <= 0.0) {
            let t = sa / (sa - sb);
            out.push(a + (b - a) * t);
        }
    }
    out
}

/// Clip a polygon against a convex counter-clockwise window.
pub fn clip_convex(poly: &[Vec2], window: &[Vec2]) -> Vec<Vec2> {
    let mut out = poly.to_vec();
    let m = window.len();
    for j in 0..m {
        if out.is_empty() {
            break;
        }
        let a = window[j];
        let b = window[(j + 1) % m];
        let e = b - a;
        // outward normal of a CCW edge
        let nrm = Vec2::new(e.y, -e.x);
        out = clip_halfplane(&out, &a, &nrm);
    }
    out
}

/// Drop consecutive duplicates (within `tol`) and closing duplicates.
pub fn dedup_ring(poly: &mut Vec<Vec2>, tol: f64) {
    poly.dedup_by(|a, b| (*a - *b).norm() <= tol);
    while poly.len() > 1 && (poly[0] - poly[poly.len() - 1]).norm() <= tol {
        poly.pop();
    }
}

/// Regular polygon with `n` vertices approximating a circle, counter-clockwise.
pub fn circle_polygon(center: Vec2, radius: f64, n: usize) -> Vec<Vec2> {
    (0..n)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            center + Vec2::new(radius * a.cos(), radius * a.sin())
        })
        .collect()
}

pub fn rectangle(min: Vec2, max: Vec2) -> Vec<Vec2> {
    vec![min, Vec2::new(max.x, min.y), max, Vec2::new(min.x, max.y)]
}

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Aabb {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Aabb {
    pub fn new(min: [f64; 2], max: [f64; 2]) -> Self {
        Aabb { min, max }
    }

    pub fn of_points<'a>(pts: impl IntoIterator<Item = &'a Vec2>) -> Self {
        let mut b = Aabb::new([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in pts {
            b.min[0] = b.min[0].min(p.x);
            b.min[1] = b.min[1].min(p.y);
            b.max[0] = b.max[0].max(p.x);
            b.max[1] = b.max[1].max(p.y);
        }
        b
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn contains(&self, p: &Vec2, tol: f64) -> bool {
        p.x >= self.min[0] - tol
            && p.x <= self.max[0] + tol
            && p.y >= self.min[1] - tol
            && p.y <= self.max[1] + tol
    }

    pub fn contains_box(&self, other: &Aabb, tol: f64) -> bool {
        self.contains(&Vec2::new(other.min[0], other.min[1]), tol)
            && self.contains(&Vec2::new(other.max[0], other.max[1]), tol)
    }

    pub fn intersects(&self, other: &Aabb) -> bool {
        self.min[0] < other.max[0]
            && other.min[0] < self.max[0]
            && self.min[1] < other.max[1]
            && other.min[1] < self.max[1]
    }

    pub fn inflate(&self, m: f64) -> Aabb {
        Aabb::new(
            [self.min[0] - m, self.min[1] - m],
            [self.max[0] + m, self.max[1] + m],
        )
    }

    pub fn intersection(&self, other: &Aabb) -> Aabb {
        Aabb::new(
            [self.min[0].max(other.min[0]), self.min[1].max(other.min[1])],
            [self.max[0].min(other.max[0]), self.max[1].min(other.max[1])],
        )
    }

    pub fn polygon(&self) -> Vec<Vec2> {
        rectangle(
            Vec2::new(self.min[0], self.min[1]),
            Vec2::new(self.max[0], self.max[1]),
        )
    }
}

#[derive(Clone, Copy)]
struct Crossing {
    point: Vec2,
    // position along the subject ring: edge index + parameter
    p_key: f64,
    // position along the hole ring
    q_key: f64,
    entering: bool,
}

/// Boolean difference `poly \ hole` for a simple counter-clockwise `poly` and a
/// convex counter-clockwise `hole`. Returns the counter-clockwise pieces.
pub fn subtract_convex(poly: &[Vec2], hole: &[Vec2]) -> Vec<Vec<Vec2>> {
    let n = poly.len();
    let m = hole.len();
    let scale = diameter(poly).max(diameter(hole));
    let eps = 1e-14 * scale * scale;

    // Orientation of p with respect to hole edge j; zero counts as outside.
    let orient = |j: usize, p: &Vec2| -> f64 {
        let a = hole[j];
        let b = hole[(j + 1) % m];
        cross(&(b - a), &(p - a))
    };
    let strictly_inside = |p: &Vec2| (0..m).all(|j| orient(j, p) > eps);

    let mut crossings: Vec<Crossing> = Vec::new();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let d = b - a;
        for j in 0..m {
            let sa = orient(j, &a);
            let sb = orient(j, &b);
            let (ia, ib) = (sa > eps, sb > eps);
            if ia == ib {
                continue;
            }
            let q0 = hole[j];
            let q1 = hole[(j + 1) % m];
            let s = q1 - q0;
            // hole endpoints relative to the subject edge, zero counts as positive
            let oa = cross(&d, &(q0 - a));
            let ob = cross(&d, &(q1 - a));
            if (oa >= 0.0) == (ob >= 0.0) {
                continue;
            }
            let t = sa / (sa - sb);
            let u = oa / (oa - ob);
            let _ = s;
            crossings.push(Crossing {
                point: a + d * t,
                p_key: i as f64 + t.clamp(0.0, 1.0 - 1e-15),
                q_key: j as f64 + u.clamp(0.0, 1.0 - 1e-15),
                entering: ib,
            });
        }
    }

    if crossings.is_empty() {
        if poly.iter().all(strictly_inside) {
            return Vec::new();
        }
        let hc = centroid(hole);
        if point_in_polygon(&hc, poly) && hole.iter().all(|q| point_in_polygon(q, poly)) {
            // Hole fully enclosed: cut the subject through the hole and recurse.
            let nrm = Vec2::new(1.0, 0.0);
            let left = clip_halfplane(poly, &hc, &nrm);
            let right = clip_halfplane(poly, &hc, &(-nrm));
            let mut out = Vec::new();
            for part in [left, right] {
                if part.len() >= 3 && signed_area(&part).abs() > eps {
                    out.extend(subtract_convex(&part, hole));
                }
            }
            return out;
        }
        return vec![poly.to_vec()];
    }
    if crossings.len() % 2 == 1 {
        // Inconsistent classification; nudge the hole inward and retry.
        let c = centroid(hole);
        let shrunk: Vec<Vec2> = hole.iter().map(|q| c + (q - c) * (1.0 - 1e-9)).collect();
        return subtract_convex(poly, &shrunk);
    }

    // order along each ring
    let mut by_p: Vec<usize> = (0..crossings.len()).collect();
    by_p.sort_by(|&x, &y| crossings[x].p_key.partial_cmp(&crossings[y].p_key).unwrap());
    let mut by_q: Vec<usize> = (0..crossings.len()).collect();
    by_q.sort_by(|&x, &y| crossings[x].q_key.partial_cmp(&crossings[y].q_key).unwrap());
    let pos_p: Vec<usize> = {
        let mut v = vec![0; crossings.len()];
        for (k, &c) in by_p.iter().enumerate() {
            v[c] = k;
        }
        v
    };
    let pos_q: Vec<usize> = {
        let mut v = vec![0; crossings.len()];
        for (k, &c) in by_q.iter().enumerate() {
            v[c] = k;
        }
        v
    };

    let mut visited = vec![false; crossings.len()];
    let mut pieces = Vec::new();
    for start in 0..crossings.len() {
        if crossings[start].entering || visited[start] {
            continue;
        }
        let mut ring: Vec<Vec2> = Vec::new();
        let mut cur = start;
        let mut guard = 0;
        loop {
            guard += 1;
            if guard > 4 * (n + m + crossings.len()) {
                break;
            }
            visited[cur] = true;
            // cur is an exit: walk the subject forward to the next entry
            ring.push(crossings[cur].point);
            let next = by_p[(pos_p[cur] + 1) % by_p.len()];
            let from = crossings[cur].p_key;
            let to = crossings[next].p_key;
            push_vertices_forward(poly, from, to, &mut ring);
            // next is an entry: walk the hole backward to the previous crossing
            visited[next] = true;
            ring.push(crossings[next].point);
            let back = by_q[(pos_q[next] + by_q.len() - 1) % by_q.len()];
            push_vertices_backward(
                hole,
                crossings[next].q_key,
                crossings[back].q_key,
                &mut ring,
            );
            cur = back;
            if cur == start {
                break;
            }
        }
        dedup_ring(&mut ring, 1e-13 * scale);
        for part in split_pinched(ring, 1e-9 * scale) {
            if part.len() >= 3 && signed_area(&part) > eps {
                pieces.push(part);
            }
        }
    }
    pieces
}

/// Split a ring that touches itself (a hole vertex on a subject edge) into simple rings.
fn split_pinched(mut ring: Vec<Vec2>, tol: f64) -> Vec<Vec<Vec2>> {
    // make every touching point a repeated vertex
    let mut k = 0;
    while k < ring.len() {
        let n = ring.len();
        let (a, b) = (ring[k], ring[(k + 1) % n]);
        let hit = (0..n).find(|&i| {
            let (d, t) = distance_to_segment(&ring[i], &a, &b);
            d <= tol
                && t > 0.0
                && t < 1.0
                && (ring[i] - a).norm() > tol
                && (ring[i] - b).norm() > tol
        });
        match hit {
            Some(i) => ring.insert(k + 1, ring[i]),
            None => k += 1,
        }
    }
    split_repeated(ring, tol)
}

fn split_repeated(ring: Vec<Vec2>, tol: f64) -> Vec<Vec<Vec2>> {
    let n = ring.len();
    for i in 0..n {
        for j in i + 2..n {
            if (ring[i] - ring[j]).norm() <= tol && !(i == 0 && j == n - 1) {
                let inner: Vec<Vec2> = ring[i..j].to_vec();
                let outer: Vec<Vec2> = ring[..i].iter().chain(&ring[j..]).copied().collect();
                let mut out = split_repeated(inner, tol);
                out.extend(split_repeated(outer, tol));
                return out;
            }
        }
    }
    vec![ring]
}

/// Push subject vertices strictly between ring positions `from` and `to` walking forward.
fn push_vertices_forward(poly: &[Vec2], from: f64, to: f64, out: &mut Vec<Vec2>) {
    let n = poly.len();
    let fi = from.floor() as usize;
    let ti = to.floor() as usize;
    if ti == fi && to > from {
        return;
    }
    let mut k = (fi + 1) % n;
    loop {
        out.push(poly[k]);
        if k == ti {
            break;
        }
        k = (k + 1) % n;
    }
}

/// Push hole vertices strictly between positions `from` and `to` walking backward.
fn push_vertices_backward(ring: &[Vec2], from: f64, to: f64, out: &mut Vec<Vec2>) {
    let m = ring.len();
    let fi = from.floor() as usize;
    let ti = to.floor() as usize;
    if ti == fi && to < from {
        return;
    }
    // vertices fi, fi-1, ..., ti+1
    let mut k = fi;
    loop {
        out.push(ring[k]);
        let stop = (ti + 1) % m;
        if k == stop {
            break;
        }
        k = (k + m - 1) % m;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vec2 {
        Vec2::new(x, y)
    }

    #[test]
    fn area_and_centroid_of_square() {
        let sq = rectangle(v(0.0, 0.0), v(2.0, 1.0));
        assert!((signed_area(&sq) - 2.0).abs() < 1e-15);
        let c = centroid(&sq);
        assert!((c - v(1.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn notch_subtraction() {
        let p = rectangle(v(0.0, 0.0), v(4.0, 4.0));
        let q = rectangle(v(3.0, 1.0), v(5.0, 2.0));
        let pieces = subtract_convex(&p, &q);
        assert_eq!(pieces.len(), 1);
        assert!((signed_area(&pieces[0]) - 15.0).abs() < 1e-12);
        assert_eq!(pieces[0].len(), 8);
    }

    #[test]
    fn hole_splits_subject_in_two() {
        let p = rectangle(v(0.0, 0.0), v(4.0, 1.0));
        let q = rectangle(v(1.0, -1.0), v(2.0, 2.0));
        let pieces = subtract_convex(&p, &q);
        assert_eq!(pieces.len(), 2, "{pieces:?}");
        let total: f64 = pieces.iter().map(|r| signed_area(r)).sum();
        assert!((total - 3.0).abs() < 1e-12);
    }

    #[test]
    fn enclosed_and_covering_holes() {
        let p = rectangle(v(0.0, 0.0), v(4.0, 4.0));
        let q = circle_polygon(v(2.0, 2.0), 1.0, 64);
        let pieces = subtract_convex(&p, &q);
        let total: f64 = pieces.iter().map(|r| signed_area(r)).sum();
        assert!((total - (16.0 - signed_area(&q))).abs() < 1e-10);
        let big = rectangle(v(-1.0, -1.0), v(5.0, 5.0));
        assert!(subtract_convex(&p, &big).is_empty());
        let far = rectangle(v(10.0, 10.0), v(11.0, 11.0));
        assert_eq!(subtract_convex(&p, &far).len(), 1);
    }

    #[test]
    fn circle_cut_conserves_area() {
        let p = rectangle(v(0.0, 0.0), v(1.0, 1.0));
        let q = circle_polygon(v(1.0, 1.0), 0.5, 64);
        let pieces = subtract_convex(&p, &q);
        assert_eq!(pieces.len(), 1);
        let inter = clip_convex(&p, &q);
        assert!((signed_area(&pieces[0]) + signed_area(&inter) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hole_vertex_on_subject_edge_gives_simple_rings() {
        // diamond whose left corner sits on the square's left edge: two corner slivers
        let p = rectangle(v(0.0, 0.0), v(1.0, 1.0));
        let q2 = vec![v(0.0, 0.5), v(1.0, -1.0), v(3.0, 0.5), v(1.0, 2.0)];
        let pieces = subtract_convex(&p, &q2);
        assert_eq!(pieces.len(), 2, "{pieces:?}");
        let total: f64 = pieces.iter().map(|r| signed_area(r)).sum();
        assert!((total - (1.0 - signed_area(&clip_convex(&p, &q2)))).abs() < 1e-12);
        for r in &pieces {
            for i in 0..r.len() {
                for j in i + 1..r.len() {
                    assert!((r[i] - r[j]).norm() > 1e-12, "repeated vertex in {r:?}");
                }
            }
        }
    }
}
