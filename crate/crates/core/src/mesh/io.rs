//! Line-oriented text mesh format.
//!
//! ```text
//! POLYMESH 1
//! NODES k
//! x y            (k lines)
//! ELEMS m
//! n i1 ... in    (m lines, 0-based)
//! SET name edges count
//! a b            (count lines)
//! SET name nodes count
//! i              (count lines)
//! REFINED xmin ymin xmax ymax   (optional)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{BoundarySet, PolyMesh};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Vec2};

fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_string(mesh: &PolyMesh) -> String {
    let mut s = String::new();
    s.push_str("POLYMESH 1\n");
    let _ = writeln!(s, "NODES {}", mesh.nodes.len());
    for p in &mesh.nodes {
        let _ = writeln!(s, "{} {}", f17(p.x), f17(p.y));
    }
    let _ = writeln!(s, "ELEMS {}", mesh.elements.len());
    for ring in &mesh.elements {
        s.push_str(&ring.len().to_string());
        for i in ring {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
    }
    for (name, set) in &mesh.boundary_sets {
        match set {
            BoundarySet::Edges(es) => {
                let _ = writeln!(s, "SET {name} edges {}", es.len());
                for e in es {
                    let _ = writeln!(s, "{} {}", e[0], e[1]);
                }
            }
            BoundarySet::Nodes(ns) => {
                let _ = writeln!(s, "SET {name} nodes {}", ns.len());
                for n in ns {
                    let _ = writeln!(s, "{n}");
                }
            }
        }
    }
    if let Some(r) = &mesh.refined_region {
        let _ = writeln!(
            s,
            "REFINED {} {} {} {}",
            f17(r.min[0]),
            f17(r.min[1]),
            f17(r.max[0]),
            f17(r.max[1])
        );
    }
    s
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<Vec<&'a str>> {
        for (i, l) in self.it.by_ref() {
            let l = l.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            self.line = i + 1;
            return Some(l.split_whitespace().collect());
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<Vec<&'a str>> {
        self.next().ok_or_else(|| Error::Parse {
            line: self.line + 1,
            msg: format!("unexpected end of file, expected {what}"),
        })
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }
}

fn num<T: std::str::FromStr>(lines: &Lines, tok: &str) -> Result<T> {
    tok.parse::<T>()
        .map_err(|_| lines.err(format!("cannot parse '{tok}'")))
}

pub fn from_str(text: &str) -> Result<PolyMesh> {
    let mut lines = Lines {
        it: text.lines().enumerate(),
        line: 0,
    };
    let head = lines.expect("header")?;
    if head != ["POLYMESH", "1"] {
        return Err(lines.err("expected header 'POLYMESH 1'"));
    }
    let mut mesh = PolyMesh::default();
    let t = lines.expect("NODES")?;
    if t.len() != 2 || t[0] != "NODES" {
        return Err(lines.err("expected 'NODES k'"));
    }
    let k: usize = num(&lines, t[1])?;
    for _ in 0..k {
        let t = lines.expect("node coordinates")?;
        if t.len() != 2 {
            return Err(lines.err("node line needs two coordinates"));
        }
        mesh.nodes
            .push(Vec2::new(num(&lines, t[0])?, num(&lines, t[1])?));
    }
    let t = lines.expect("ELEMS")?;
    if t.len() != 2 || t[0] != "ELEMS" {
        return Err(lines.err("expected 'ELEMS m'"));
    }
    let m: usize = num(&lines, t[1])?;
    for _ in 0..m {
        let t = lines.expect("element ring")?;
        let n: usize = num(&lines, t[0])?;
        if t.len() != n + 1 {
            return Err(lines.err(format!(
                "element declares {n} vertices but lists {}",
                t.len() - 1
            )));
        }
        let ring = t[1..]
            .iter()
            .map(|s| num::<usize>(&lines, s))
            .collect::<Result<Vec<_>>>()?;
        if let Some(&bad) = ring.iter().find(|&&i| i >= k) {
            return Err(lines.err(format!("node index {bad} out of range")));
        }
        mesh.elements.push(ring);
    }
    while let Some(t) = lines.next() {
        match t[0] {
            "SET" if t.len() == 4 => {
                let count: usize = num(&lines, t[3])?;
                let set = match t[2] {
                    "edges" => {
                        let mut es = Vec::with_capacity(count);
                        for _ in 0..count {
                            let e = lines.expect("edge")?;
                            if e.len() != 2 {
                                return Err(lines.err("edge line needs two node indices"));
                            }
                            es.push([num(&lines, e[0])?, num(&lines, e[1])?]);
                        }
                        BoundarySet::Edges(es)
                    }
                    "nodes" => {
                        let mut ns = Vec::with_capacity(count);
                        for _ in 0..count {
                            let e = lines.expect("node index")?;
                            ns.push(num(&lines, e[0])?);
                        }
                        BoundarySet::Nodes(ns)
                    }
                    other => return Err(lines.err(format!("unknown set type '{other}'"))),
                };
                mesh.boundary_sets.insert(t[1].to_string(), set);
            }
            "REFINED" if t.len() == 5 => {
                let v = t[1..]
                    .iter()
                    .map(|s| num::<f64>(&lines, s))
                    .collect::<Result<Vec<_>>>()?;
                mesh.refined_region = Some(Aabb::new([v[0], v[1]], [v[2], v[3]]));
            }
            _ => return Err(lines.err(format!("unexpected line starting with '{}'", t[0]))),
        }
    }
    Ok(mesh)
}

pub fn write(mesh: &PolyMesh, path: &Path) -> Result<()> {
    std::fs::write(path, to_string(mesh))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<PolyMesh> {
    from_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_voronoi_mesh, Domain, VoronoiOptions};

    #[test]
    fn round_trip_is_exact() {
        let d = Domain::rectangle(Vec2::zeros(), Vec2::new(1.0, 1.0));
        let mut m = generate_voronoi_mesh(
            &d,
            &VoronoiOptions {
                lloyd_iters: 5,
                ..VoronoiOptions::new(20, 2)
            },
        )
        .unwrap();
        m.boundary_sets
            .insert("pin".into(), BoundarySet::Nodes(vec![0, 3]));
        m.refined_region = Some(Aabb::new([0.1, 0.2], [0.3, 1.0 / 3.0]));
        let back = from_str(&to_string(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn reports_line_of_error() {
        let text = "POLYMESH 1\nNODES 1\n0 0\nELEMS 1\n3 0 1 2\n";
        match from_str(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }
}
