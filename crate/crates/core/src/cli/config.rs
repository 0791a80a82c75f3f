//! TOML run configuration.
//!
//! ```toml
//! config_version = 1
//! name = "edge_crack_square"
//!
//! [geometry]
//! rectangle = [0.0, 0.0, 2.0, 2.0]     # or outer = [[x, y], ...] (convex, ccw)
//! crack = [[0.0, 1.0], [1.0, 1.0]]     # last vertex is the tip
//!
//! [[geometry.holes]]
//! center = [1.0, 0.5]
//! radius = 0.2                          # or vertices = [[x, y], ...]
//!
//! [mesh]
//! kind = "voronoi"                      # or "quad" with nx, ny
//! n_seeds = 600
//! rng_seed = 7
//! refinement = { cell_size = 0.095, margin_cells = 3.5 }
//!
//! [material]
//! model = "neo-hookean-ps"              # linear | neo-hookean | neo-hookean-ps | mooney-rivlin-ps
//! mu = 0.4225e6
//!
//! [loading]
//! n_steps = 40
//! supports = [{ set = "bottom", fix = "y" }, { set = "bottom_left", fix = "xy" }]
//! loads = [{ set = "top", traction = [0.0, 5000.0] }]   # or ux / uy per step
//! ```

use serde::{Deserialize, Serialize};

use crate::enrichment::BasisOptions;
use crate::enrichment::CrackGeometry;
use crate::error::{Error, Result};
use crate::fracture::Extension;
use crate::geometry::{self, Vec2};
use crate::material::{lame_from_engineering, MaterialModel};
use crate::mesh::{
    embed_structured_refinement, generate_voronoi_mesh, structured_quad_mesh, Domain, Hole,
    PolyMesh, RefinementSpec, VoronoiOptions,
};
use crate::solver::{Load, LoadKind, LoadProgram, SolverOptions, Support};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub config_version: u32,
    pub name: String,
    pub geometry: GeometryConfig,
    pub mesh: MeshConfig,
    pub material: MaterialConfig,
    pub loading: LoadingConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub fracture: FractureConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rectangle: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<HoleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crack: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshKind {
    Voronoi,
    Quad,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub kind: MeshKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_seeds: Option<usize>,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default = "default_lloyd")]
    pub lloyd_iters: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<RefinementConfig>,
}

fn default_lloyd() -> usize {
    100
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinementConfig {
    /// Quad edge length in the crack zone [mm].
    pub cell_size: f64,
    /// Cells added around the crack bounding box.
    pub margin_cells: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MaterialConfig {
    Linear {
        e: f64,
        nu: f64,
    },
    NeoHookean {
        e: f64,
        nu: f64,
    },
    NeoHookeanPs {
        mu: f64,
        #[serde(default = "unit")]
        thickness: f64,
    },
    MooneyRivlinPs {
        mu1: f64,
        mu2: f64,
        #[serde(default = "unit")]
        thickness: f64,
    },
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadingConfig {
    pub n_steps: usize,
    #[serde(default)]
    pub supports: Vec<SupportConfig>,
    #[serde(default)]
    pub loads: Vec<LoadConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportConfig {
    pub set: String,
    /// "x", "y" or "xy".
    pub fix: String,
}

/// Per-step increments: a traction [Pa] or displacement components [mm].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadConfig {
    pub set: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traction: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ux: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uy: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub bisection: bool,
    pub max_bisections: usize,
    pub gradient_correction: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let o = SolverOptions::default();
        SolverConfig {
            tol: o.tol,
            max_iter: o.max_iter,
            bisection: o.bisection,
            max_bisections: o.max_bisections,
            gradient_correction: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FractureConfig {
    /// J domain radius in multiples of the crack-zone cell size.
    pub radius_factor: f64,
    /// Cell size h for the radius; defaults to the refinement cell size, else the
    /// tip element's diameter over sqrt(2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_size: Option<f64>,
    pub sif: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tearing: Option<TearingConfig>,
}

impl Default for FractureConfig {
    fn default() -> Self {
        FractureConfig {
            radius_factor: 3.0,
            cell_size: None,
            sif: true,
            tearing: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TearingConfig {
    pub extension: ExtensionConfig,
    /// Crack half-length c [mm].
    pub half_length: f64,
    /// Stretch added per load step.
    pub stretch_increment: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtensionConfig {
    Uniaxial,
    Equibiaxial,
}

impl From<ExtensionConfig> for Extension {
    fn from(e: ExtensionConfig) -> Self {
        match e {
            ExtensionConfig::Uniaxial => Extension::Uniaxial,
            ExtensionConfig::Equibiaxial => Extension::Equibiaxial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub vtk: bool,
    /// Write a VTK snapshot every this many steps (the last step is always written).
    pub vtk_every: usize,
    pub csv: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            vtk: true,
            vtk_every: 1,
            csv: true,
        }
    }
}

/// A validation problem tied to a dotted key path such as `loading.loads[1].set`.
#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    pub key: String,
    pub msg: String,
}

fn issue(key: impl Into<String>, msg: impl Into<String>) -> Issue {
    Issue {
        key: key.into(),
        msg: msg.into(),
    }
}

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// The crack must run through material (its mouth may sit on the boundary) and end
/// strictly inside it.
fn crack_placement_issue(domain: &Domain, crack: &[[f64; 2]]) -> Option<String> {
    const SAMPLES: usize = 64;
    let b = domain.bbox();
    let tol = 1e-9 * b.width().max(b.height());
    let pts: Vec<Vec2> = crack.iter().map(|p| Vec2::new(p[0], p[1])).collect();
    let on_outer = |p: &Vec2| geometry::distance_to_boundary(p, &domain.outer) <= tol;
    for w in pts.windows(2) {
        for i in 0..=SAMPLES {
            let p = w[0] + (w[1] - w[0]) * (i as f64 / SAMPLES as f64);
            if !domain.contains(&p) && !on_outer(&p) {
                return Some(format!(
                    "point ({:.6}, {:.6}) of the crack lies outside the material",
                    p.x, p.y
                ));
            }
        }
    }
    let tip = pts[pts.len() - 1];
    let near_hole = domain
        .holes
        .iter()
        .any(|h| geometry::distance_to_boundary(&tip, &h.polygon()) <= tol);
    if on_outer(&tip) || near_hole || !domain.contains(&tip) {
        return Some("the crack tip must lie strictly inside the material".into());
    }
    None
}

impl RunConfig {
    /// Parse and validate; errors carry the line of the offending key in `src`.
    pub fn parse(src: &str, path: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(src).map_err(|e| {
            let line = e.span().map(|s| line_of_offset(src, s.start)).unwrap_or(1);
            Error::Config {
                path: path.to_string(),
                line,
                msg: e.message().to_string(),
            }
        })?;
        if let Some(i) = cfg.issues().into_iter().next() {
            return Err(Error::Config {
                path: path.to_string(),
                line: locate_key(src, &i.key),
                msg: format!("{}: {}", i.key, i.msg),
            });
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)?;
        Self::parse(&src, &path.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }

    /// Structural checks that need no mesh.
    pub fn issues(&self) -> Vec<Issue> {
        let mut out = Vec::new();
        if self.config_version != CONFIG_VERSION {
            out.push(issue(
                "config_version",
                format!(
                    "unsupported version {} (expected {CONFIG_VERSION})",
                    self.config_version
                ),
            ));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            out.push(issue("name", "must be a non-empty file-name-safe string"));
        }
        let g = &self.geometry;
        match (&g.rectangle, &g.outer) {
            (Some(r), None) => {
                if !finite(r) || !(r[2] > r[0] && r[3] > r[1]) {
                    out.push(issue(
                        "geometry.rectangle",
                        "expected [xmin, ymin, xmax, ymax] with xmax > xmin and ymax > ymin",
                    ));
                }
            }
            (None, Some(o)) => {
                if o.len() < 3 || !o.iter().all(|p| finite(p)) {
                    out.push(issue(
                        "geometry.outer",
                        "needs at least three finite vertices",
                    ));
                }
            }
            _ => out.push(issue(
                "geometry",
                "give exactly one of `rectangle` and `outer`",
            )),
        }
        for (k, h) in g.holes.iter().enumerate() {
            let key = format!("geometry.holes[{k}]");
            match (h.center, h.radius, &h.vertices) {
                (Some(c), Some(r), None) => {
                    if !finite(&c) || !(r > 0.0 && r.is_finite()) {
                        out.push(issue(
                            key,
                            "circle needs a finite center and a positive radius",
                        ));
                    }
                }
                (None, None, Some(v)) => {
                    if v.len() < 3 {
                        out.push(issue(key, "polygonal hole needs at least three vertices"));
                    }
                }
                _ => out.push(issue(
                    key,
                    "give either `center` and `radius` or `vertices`",
                )),
            }
        }
        if let Some(c) = &g.crack {
            if c.len() < 2 || !c.iter().all(|p| finite(p)) {
                out.push(issue(
                    "geometry.crack",
                    "needs at least two finite vertices",
                ));
            } else if out.is_empty() {
                if let Some(msg) = self
                    .domain()
                    .ok()
                    .and_then(|d| crack_placement_issue(&d, c))
                {
                    out.push(issue("geometry.crack", msg));
                }
            }
        }
        let m = &self.mesh;
        match m.kind {
            MeshKind::Voronoi => {
                if !matches!(m.n_seeds, Some(n) if n > 0) {
                    out.push(issue("mesh.n_seeds", "a Voronoi mesh needs n_seeds >= 1"));
                }
            }
            MeshKind::Quad => {
                if !matches!((m.nx, m.ny), (Some(a), Some(b)) if a > 0 && b > 0) {
                    out.push(issue("mesh.nx", "a quad mesh needs nx, ny >= 1"));
                }
                if m.refinement.is_some() {
                    out.push(issue(
                        "mesh.refinement",
                        "refinement applies to Voronoi meshes only",
                    ));
                }
            }
        }
        if let Some(r) = &m.refinement {
            if !(r.cell_size > 0.0) || !(r.margin_cells >= 2.0) {
                out.push(issue(
                    "mesh.refinement",
                    "cell_size must be positive and margin_cells at least 2",
                ));
            }
            if g.crack.is_none() {
                out.push(issue(
                    "mesh.refinement",
                    "refinement is placed around the crack, but no crack is given",
                ));
            }
        }
        if let Err(e) = self.material_model() {
            out.push(issue("material", e.to_string()));
        }
        let l = &self.loading;
        if l.n_steps == 0 {
            out.push(issue("loading.n_steps", "must be at least 1"));
        }
        for (k, s) in l.supports.iter().enumerate() {
            if !matches!(s.fix.as_str(), "x" | "y" | "xy") {
                out.push(issue(
                    format!("loading.supports[{k}].fix"),
                    format!("expected \"x\", \"y\" or \"xy\", got {:?}", s.fix),
                ));
            }
        }
        for (k, ld) in l.loads.iter().enumerate() {
            let key = format!("loading.loads[{k}]");
            match (ld.traction, ld.ux.is_some() || ld.uy.is_some()) {
                (Some(t), false) if finite(&t) => {}
                (None, true)
                    if ld.ux.unwrap_or(0.0).is_finite() && ld.uy.unwrap_or(0.0).is_finite() => {}
                _ => out.push(issue(
                    key,
                    "give either a finite `traction` or `ux`/`uy` increments",
                )),
            }
        }
        let s = &self.solver;
        if !(s.tol > 0.0 && s.tol < 1.0) || s.max_iter == 0 {
            out.push(issue(
                "solver.tol",
                "tol must lie in (0, 1) and max_iter be positive",
            ));
        }
        let f = &self.fracture;
        if !(f.radius_factor > 0.0) || f.cell_size.is_some_and(|h| !(h > 0.0)) {
            out.push(issue(
                "fracture.radius_factor",
                "radius factor and cell size must be positive",
            ));
        }
        if let Some(t) = &f.tearing {
            if !(t.half_length > 0.0) || !(t.stretch_increment >= 0.0) {
                out.push(issue(
                    "fracture.tearing",
                    "half_length must be positive and stretch_increment non-negative",
                ));
            }
            if !matches!(
                self.material,
                MaterialConfig::NeoHookeanPs { .. } | MaterialConfig::MooneyRivlinPs { .. }
            ) {
                out.push(issue(
                    "fracture.tearing",
                    "tearing factors need an incompressible plane-stress model",
                ));
            }
        }
        if self.output.vtk_every == 0 {
            out.push(issue("output.vtk_every", "must be at least 1"));
        }
        out
    }

    pub fn domain(&self) -> Result<Domain> {
        let g = &self.geometry;
        let v = |p: &[f64; 2]| Vec2::new(p[0], p[1]);
        let mut d = match (&g.rectangle, &g.outer) {
            (Some(r), _) => Domain::rectangle(Vec2::new(r[0], r[1]), Vec2::new(r[2], r[3])),
            (None, Some(o)) => Domain {
                outer: o.iter().map(v).collect(),
                holes: Vec::new(),
            },
            _ => {
                return Err(Error::InvalidInput(
                    "geometry needs `rectangle` or `outer`".into(),
                ))
            }
        };
        for h in &g.holes {
            d = d.with_hole(match (h.center, h.radius, &h.vertices) {
                (Some(c), Some(r), _) => Hole::Circle {
                    center: v(&c),
                    radius: r,
                },
                (_, _, Some(p)) => Hole::Polygon(p.iter().map(v).collect()),
                _ => {
                    return Err(Error::InvalidInput(
                        "hole needs center/radius or vertices".into(),
                    ))
                }
            });
        }
        Ok(d)
    }

    pub fn crack(&self) -> Result<Option<CrackGeometry>> {
        self.geometry
            .crack
            .as_ref()
            .map(|c| CrackGeometry::new(c.iter().map(|p| Vec2::new(p[0], p[1])).collect()))
            .transpose()
    }

    pub fn build_mesh(&self) -> Result<PolyMesh> {
        let domain = self.domain()?;
        let m = &self.mesh;
        match m.kind {
            MeshKind::Quad => structured_quad_mesh(&domain, m.nx.unwrap_or(1), m.ny.unwrap_or(1)),
            MeshKind::Voronoi => {
                let mut opts = VoronoiOptions::new(m.n_seeds.unwrap_or(1), m.rng_seed);
                opts.lloyd_iters = m.lloyd_iters;
                match (&m.refinement, self.crack()?) {
                    (Some(r), Some(crack)) => {
                        let spec =
                            RefinementSpec::around_crack(&crack, r.cell_size, r.margin_cells);
                        opts.exclusions.push(spec.region);
                        let coarse = generate_voronoi_mesh(&domain, &opts)?;
                        embed_structured_refinement(&coarse, &spec, &crack)
                    }
                    _ => generate_voronoi_mesh(&domain, &opts),
                }
            }
        }
    }

    pub fn material_model(&self) -> Result<MaterialModel> {
        let m = match self.material {
            MaterialConfig::Linear { e, nu } => {
                let (lambda, mu) = lame_from_engineering(e, nu)?;
                MaterialModel::LinearElastic { lambda, mu }
            }
            MaterialConfig::NeoHookean { e, nu } => {
                let (lambda, mu) = lame_from_engineering(e, nu)?;
                MaterialModel::NeoHookeanCompressible { lambda, mu }
            }
            MaterialConfig::NeoHookeanPs { mu, thickness } => {
                MaterialModel::NeoHookeanIncompressiblePS { mu, thickness }
            }
            MaterialConfig::MooneyRivlinPs {
                mu1,
                mu2,
                thickness,
            } => MaterialModel::MooneyRivlinPS {
                mu1,
                mu2,
                thickness,
            },
        };
        m.validate()?;
        Ok(m)
    }

    pub fn load_program(&self) -> LoadProgram {
        let l = &self.loading;
        LoadProgram {
            supports: l
                .supports
                .iter()
                .map(|s| Support {
                    set: s.set.clone(),
                    fix_x: s.fix.contains('x'),
                    fix_y: s.fix.contains('y'),
                })
                .collect(),
            loads: l
                .loads
                .iter()
                .map(|ld| Load {
                    set: ld.set.clone(),
                    kind: match ld.traction {
                        Some(t) => LoadKind::Traction(Vec2::new(t[0], t[1])),
                        None => LoadKind::Displacement([ld.ux, ld.uy]),
                    },
                })
                .collect(),
            n_steps: l.n_steps,
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        let s = &self.solver;
        SolverOptions {
            tol: s.tol,
            max_iter: s.max_iter,
            bisection: s.bisection,
            max_bisections: s.max_bisections,
        }
    }

    pub fn basis_options(&self) -> BasisOptions {
        BasisOptions {
            correct_gradients: self.solver.gradient_correction,
            ..Default::default()
        }
    }

    /// Traction magnitude applied per step, for the (step, load) curve.
    pub fn load_per_step(&self) -> f64 {
        self.loading
            .loads
            .iter()
            .map(|l| match l.traction {
                Some(t) => Vec2::new(t[0], t[1]).norm(),
                None => Vec2::new(l.ux.unwrap_or(0.0), l.uy.unwrap_or(0.0)).norm(),
            })
            .fold(0.0, f64::max)
    }
}

fn line_of_offset(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// Best-effort line of a dotted key path (`a.b[2].c`) in TOML source: the line
/// defining the deepest component found, else 1.
pub fn locate_key(src: &str, key: &str) -> usize {
    // split into (name, index) components
    let parts: Vec<(String, Option<usize>)> = key
        .split('.')
        .map(|p| match p.find('[') {
            Some(i) => (p[..i].to_string(), p[i + 1..p.len() - 1].parse().ok()),
            None => (p.to_string(), None),
        })
        .collect();
    let mut best = 1;
    let mut table: Vec<String> = Vec::new();
    let mut counts: std::collections::HashMap<String, usize> = Default::default();
    for (ln, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if let Some(h) = line.strip_prefix("[[").and_then(|l| l.split("]]").next()) {
            let name = h.trim().to_string();
            let c = counts.entry(name.clone()).or_insert(0);
            table = name.split('.').map(str::to_string).collect();
            if let Some(last) = table.last_mut() {
                *last = format!("{last}[{}]", *c);
            }
            *c += 1;
        } else if let Some(h) = line.strip_prefix('[').and_then(|l| l.split(']').next()) {
            table = h.trim().split('.').map(str::to_string).collect();
        } else if let Some((k, _)) = line.split_once('=') {
            let k = k.trim();
            let mut path: Vec<String> = table.clone();
            path.push(k.to_string());
            // match the path against the key prefix, ignoring indices for inline arrays
            let depth = parts
                .iter()
                .zip(&path)
                .take_while(|((name, idx), p)| {
                    let (pn, pi) = match p.find('[') {
                        Some(i) => (&p[..i], p[i + 1..p.len() - 1].parse::<usize>().ok()),
                        None => (p.as_str(), None),
                    };
                    pn == name && (pi.is_none() || pi == *idx)
                })
                .count();
            if depth == path.len() && depth > 0 {
                let exact = depth == parts.len();
                if exact || best == 1 {
                    best = ln + 1;
                }
                if exact {
                    break;
                }
            }
            continue;
        } else {
            continue;
        }
        // a table header matching a key prefix is itself a candidate
        let depth = parts
            .iter()
            .zip(&table)
            .take_while(|((name, idx), t)| match idx {
                Some(i) => **t == format!("{name}[{i}]"),
                None => *t == name,
            });
        if depth.count() == table.len() && !table.is_empty() && best == 1 {
            best = ln + 1;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
config_version = 1
name = "sample"

[geometry]
rectangle = [0.0, 0.0, 2.0, 2.0]
crack = [[0.0, 1.0], [1.0, 1.0]]

[mesh]
kind = "voronoi"
n_seeds = 100
rng_seed = 3
refinement = { cell_size = 0.1, margin_cells = 3.5 }

[material]
model = "neo-hookean-ps"
mu = 0.4225e6

[loading]
n_steps = 4

[[loading.supports]]
set = "bottom"
fix = "y"

[[loading.supports]]
set = "bottom_left"
fix = "xy"

[[loading.loads]]
set = "top"
traction = [0.0, 5000.0]
"#;

    #[test]
    fn round_trip() {
        let a = RunConfig::parse(SAMPLE, "sample.toml").unwrap();
        let b = RunConfig::parse(&a.to_toml(), "again.toml").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.solver, SolverConfig::default());
        assert_eq!(
            a.load_program().supports[1],
            Support {
                set: "bottom_left".into(),
                fix_x: true,
                fix_y: true
            }
        );
    }

    #[test]
    fn errors_point_at_the_line() {
        let bad = SAMPLE.replace("fix = \"xy\"", "fix = \"z\"");
        match RunConfig::parse(&bad, "c.toml") {
            Err(Error::Config { line, msg, .. }) => {
                assert_eq!(
                    bad.lines().nth(line - 1).unwrap().trim(),
                    "fix = \"z\"",
                    "{msg}"
                );
            }
            other => panic!("{other:?}"),
        }
        let bad = SAMPLE.replace("n_seeds = 100", "n_seeds = -1");
        match RunConfig::parse(&bad, "c.toml") {
            Err(Error::Config { line, .. }) => {
                assert_eq!(bad.lines().nth(line - 1).unwrap().trim(), "n_seeds = -1")
            }
            other => panic!("{other:?}"),
        }
        let bad = SAMPLE.replace("config_version = 1", "config_version = 2");
        match RunConfig::parse(&bad, "c.toml") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn crack_must_end_inside_the_material() {
        for crack in [
            "[[0.0, 1.0], [2.5, 1.0]]",
            "[[-0.5, 1.0], [1.0, 1.0]]",
            "[[0.0, 1.0], [2.0, 1.0]]",
        ] {
            let bad = SAMPLE.replace("[[0.0, 1.0], [1.0, 1.0]]", crack);
            match RunConfig::parse(&bad, "c.toml") {
                Err(Error::Config { line, .. }) => assert!(
                    bad.lines().nth(line - 1).unwrap().starts_with("crack"),
                    "{crack}"
                ),
                other => panic!("{crack}: {other:?}"),
            }
        }
        let inner = SAMPLE.replace("[[0.0, 1.0], [1.0, 1.0]]", "[[0.5, 1.0], [1.0, 1.0]]");
        assert!(RunConfig::parse(&inner, "c.toml").is_ok());
    }
}
