//! Planar-facet indoor scenes and candidate position grids.
//!
//! Scene files are plain UTF-8 text:
//!
//! ```text
//! scene v1
//! # comments and blank lines are ignored
//! material wood 1.99 0.012
//! bounds 0 0 0 12 6 3
//! facet wood 0 0 0  12 0 0  12 6 0  0 6 0
//! ```
//!
//! `bounds` is optional; without it the scene bounds are the bounding box of
//! its facets. The material `wood` is predefined and may be redeclared.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Plane, Point3};

pub const COPLANARITY_TOLERANCE: f64 = 1e-6;
const BOUNDS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    pub relative_permittivity: f64,
    /// S/m
    pub conductivity: f64,
}

impl Material {
    pub fn new(name: impl Into<String>, relative_permittivity: f64, conductivity: f64) -> Result<Self> {
        let m = Self {
            name: name.into(),
            relative_permittivity,
            conductivity,
        };
        m.validate()?;
        Ok(m)
    }

    /// Wood at 3.75 GHz.
    pub fn wood() -> Self {
        Self {
            name: "wood".into(),
            relative_permittivity: 1.99,
            conductivity: 0.012,
        }
    }

    /// A material with no contrast to free space.
    pub fn vacuum() -> Self {
        Self {
            name: "vacuum".into(),
            relative_permittivity: 1.0,
            conductivity: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: &str| Error::InvalidMaterial {
            name: self.name.clone(),
            msg: msg.into(),
        };
        if !(self.relative_permittivity >= 1.0) || !self.relative_permittivity.is_finite() {
            return Err(err("relative permittivity must be >= 1"));
        }
        if !(self.conductivity >= 0.0) || !self.conductivity.is_finite() {
            return Err(err("conductivity must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub vertices: Vec<Point3>,
    /// Index into [`Scene::materials`].
    pub material: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub materials: Vec<Material>,
    pub facets: Vec<Facet>,
    pub bounds: Aabb,
}

impl Default for Scene {
    fn default() -> Self {
        Self::empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    DegeneratePolygon,
    NonCoplanar,
    OutOfBounds,
    UnknownMaterial,
}

impl std::fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DiagnosticKind::DegeneratePolygon => "degenerate polygon",
            DiagnosticKind::NonCoplanar => "vertices not coplanar",
            DiagnosticKind::OutOfBounds => "out of bounds",
            DiagnosticKind::UnknownMaterial => "unknown material",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub facet: usize,
    pub kind: DiagnosticKind,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "facet {}: {}", self.facet, self.kind)
    }
}

impl Scene {
    /// Free space.
    pub fn empty() -> Self {
        Self {
            materials: vec![Material::wood()],
            facets: Vec::new(),
            bounds: Aabb::unbounded(),
        }
    }

    /// Builds a scene from materials and facets, deriving the bounds from the
    /// facet vertices, and validates it.
    pub fn new(materials: Vec<Material>, facets: Vec<Facet>) -> Result<Self> {
        let bounds = Aabb::from_points(facets.iter().flat_map(|f| f.vertices.iter()))
            .unwrap_or_else(Aabb::unbounded);
        Self::with_bounds(materials, facets, bounds)
    }

    pub fn with_bounds(materials: Vec<Material>, facets: Vec<Facet>, bounds: Aabb) -> Result<Self> {
        for m in &materials {
            m.validate()?;
        }
        let scene = Self {
            materials,
            facets,
            bounds,
        };
        if let Some(d) = validate_scene(&scene).into_iter().next() {
            return Err(Error::InvalidFacet {
                index: d.facet,
                rule: d.kind.to_string(),
            });
        }
        Ok(scene)
    }

    pub fn material_of(&self, facet: &Facet) -> &Material {
        &self.materials[facet.material]
    }

    pub fn material_index(&self, name: &str) -> Option<usize> {
        self.materials.iter().position(|m| m.name == name)
    }

    /// Serializes to the scene text format; coordinates use the shortest
    /// representation that round-trips exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::from("scene v1\n");
        for m in &self.materials {
            let _ = writeln!(
                out,
                "material {} {} {}",
                m.name, m.relative_permittivity, m.conductivity
            );
        }
        if self.bounds.is_bounded() {
            let (a, b) = (self.bounds.min, self.bounds.max);
            let _ = writeln!(out, "bounds {} {} {} {} {} {}", a.x, a.y, a.z, b.x, b.y, b.z);
        }
        for f in &self.facets {
            out.push_str("facet ");
            out.push_str(&self.materials[f.material].name);
            for v in &f.vertices {
                let _ = write!(out, " {} {} {}", v.x, v.y, v.z);
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut materials = vec![Material::wood()];
        let mut facets = Vec::new();
        let mut bounds = None;
        let mut seen_header = false;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tok = line.split_whitespace();
            let keyword = tok.next().unwrap_or_default();
            if !seen_header {
                if keyword == "scene" && tok.next() == Some("v1") && tok.next().is_none() {
                    seen_header = true;
                    continue;
                }
                return Err(perr(line_no, "expected header `scene v1`".into()));
            }
            let rest: Vec<&str> = tok.collect();
            let nums = |toks: &[&str]| -> Result<Vec<f64>> {
                toks.iter()
                    .map(|t| {
                        t.parse::<f64>()
                            .ok()
                            .filter(|x| x.is_finite())
                            .ok_or_else(|| perr(line_no, format!("invalid number `{t}`")))
                    })
                    .collect()
            };
            match keyword {
                "material" => {
                    if rest.len() != 3 {
                        return Err(perr(line_no, "expected `material <name> <eps_r> <sigma>`".into()));
                    }
                    let v = nums(&rest[1..])?;
                    let m = Material::new(rest[0], v[0], v[1])
                        .map_err(|e| perr(line_no, e.to_string()))?;
                    match materials.iter_mut().find(|x| x.name == m.name) {
                        // the predefined wood may be overridden once, before use
                        Some(existing) if existing.name == "wood" && facets.is_empty() => *existing = m,
                        Some(_) => {
                            return Err(perr(line_no, format!("duplicate material `{}`", m.name)))
                        }
                        None => materials.push(m),
                    }
                }
                "bounds" => {
                    let v = nums(&rest)?;
                    if v.len() != 6 {
                        return Err(perr(line_no, "expected `bounds xmin ymin zmin xmax ymax zmax`".into()));
                    }
                    if v[0] > v[3] || v[1] > v[4] || v[2] > v[5] {
                        return Err(perr(line_no, "bounds min exceeds max".into()));
                    }
                    bounds = Some(Aabb::new(
                        Point3::new(v[0], v[1], v[2]),
                        Point3::new(v[3], v[4], v[5]),
                    ));
                }
                "facet" => {
                    let Some((name, coords)) = rest.split_first() else {
                        return Err(perr(line_no, "facet needs a material".into()));
                    };
                    let material = materials
                        .iter()
                        .position(|m| m.name == *name)
                        .ok_or_else(|| perr(line_no, format!("unknown material `{name}`")))?;
                    let v = nums(coords)?;
                    if v.len() % 3 != 0 {
                        return Err(perr(line_no, "vertex coordinates must come in triples".into()));
                    }
                    let vertices = v.chunks(3).map(|c| Point3::new(c[0], c[1], c[2])).collect();
                    facets.push(Facet { vertices, material });
                }
                other => return Err(perr(line_no, format!("unknown record `{other}`"))),
            }
        }
        if !seen_header {
            return Err(perr(1, "missing header `scene v1`".into()));
        }
        match bounds {
            Some(b) => Self::with_bounds(materials, facets, b),
            None => Self::new(materials, facets),
        }
    }
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Scene::parse(&text, path)
}

/// Returns one diagnostic per violated facet rule; empty iff the scene is valid.
pub fn validate_scene(scene: &Scene) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (index, facet) in scene.facets.iter().enumerate() {
        let push = |out: &mut Vec<Diagnostic>, kind| out.push(Diagnostic { facet: index, kind });
        if facet.material >= scene.materials.len() {
            push(&mut out, DiagnosticKind::UnknownMaterial);
        }
        match Plane::from_polygon(&facet.vertices) {
            None => push(&mut out, DiagnosticKind::DegeneratePolygon),
            Some((plane, _)) => {
                let off = facet
                    .vertices
                    .iter()
                    .map(|v| plane.signed_distance(v).abs())
                    .fold(0.0, f64::max);
                if off > COPLANARITY_TOLERANCE {
                    push(&mut out, DiagnosticKind::NonCoplanar);
                }
            }
        }
        if !facet
            .vertices
            .iter()
            .all(|v| scene.bounds.contains(v, BOUNDS_TOLERANCE))
        {
            push(&mut out, DiagnosticKind::OutOfBounds);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// x/y of the first point; its z is replaced by `height`.
    pub origin: [f64; 3],
    pub rows: usize,
    pub cols: usize,
    pub row_step: f64,
    pub col_step: f64,
    pub height: f64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.rows * self.cols == 0 {
            return Err(Error::Config("grid needs rows*cols >= 1".into()));
        }
        if !(self.row_step > 0.0 && self.col_step > 0.0) {
            return Err(Error::Config("grid steps must be > 0".into()));
        }
        Ok(())
    }
}

/// Row-major grid: columns advance along x, rows along y.
pub fn generate_grid(spec: &GridSpec) -> Vec<Point3> {
    let [ox, oy, _] = spec.origin;
    (0..spec.rows)
        .flat_map(|r| {
            (0..spec.cols).map(move |c| {
                Point3::new(
                    ox + c as f64 * spec.col_step,
                    oy + r as f64 * spec.row_step,
                    spec.height,
                )
            })
        })
        .collect()
}

/// Axis-aligned box room: floor, ceiling and four walls, all of one material.
pub fn box_room(size: [f64; 3], material: Material) -> Scene {
    let [x, y, z] = size;
    let p = Point3::new;
    let quads = [
        [p(0., 0., 0.), p(x, 0., 0.), p(x, y, 0.), p(0., y, 0.)],
        [p(0., 0., z), p(x, 0., z), p(x, y, z), p(0., y, z)],
        [p(0., 0., 0.), p(x, 0., 0.), p(x, 0., z), p(0., 0., z)],
        [p(0., y, 0.), p(x, y, 0.), p(x, y, z), p(0., y, z)],
        [p(0., 0., 0.), p(0., y, 0.), p(0., y, z), p(0., 0., z)],
        [p(x, 0., 0.), p(x, y, 0.), p(x, y, z), p(x, 0., z)],
    ];
    let facets = quads
        .into_iter()
        .map(|q| Facet {
            vertices: q.to_vec(),
            material: 0,
        })
        .collect();
    Scene::new(vec![material], facets).expect("box room is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<Scene> {
        Scene::parse(text, Path::new("test.scene"))
    }

    #[test]
    fn empty_scene_is_free_space() {
        let s = parse("scene v1\n").unwrap();
        assert!(s.facets.is_empty());
    }

    #[test]
    fn single_rectangle() {
        let s = parse("scene v1\nfacet wood 0 0 0 1 0 0 1 1 0 0 1 0\n").unwrap();
        assert_eq!(s.facets.len(), 1);
        assert_eq!(s.material_of(&s.facets[0]).name, "wood");
    }

    #[test]
    fn non_coplanar_names_facet_zero() {
        let err = parse("scene v1\nfacet wood 0 0 0 1 0 0 1 1 0 0 1 1\n").unwrap_err();
        match err {
            Error::InvalidFacet { index, rule } => {
                assert_eq!(index, 0);
                assert!(rule.contains("coplanar"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse("scene v1\n\nfacet glass 0 0 0 1 0 0 1 1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse("facet wood 0 0 0 1 0 0 1 1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse("scene v1\nfacet wood 0 0 0 1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn custom_material_and_override() {
        let s = parse("scene v1\nmaterial wood 2.5 0.02\nmaterial concrete 5.24 0.1\nfacet concrete 0 0 0 1 0 0 1 1 0\n")
            .unwrap();
        assert_eq!(s.materials[0].relative_permittivity, 2.5);
        assert_eq!(s.material_of(&s.facets[0]).name, "concrete");
        assert!(parse("scene v1\nmaterial bad 0.5 0\n").is_err());
    }

    #[test]
    fn validate_reports_rules() {
        let room = box_room([4.0, 3.0, 2.5], Material::wood());
        assert!(validate_scene(&room).is_empty());

        let mut s = Scene::empty();
        s.facets.push(Facet {
            vertices: vec![Point3::origin(), Point3::new(1.0, 0.0, 0.0)],
            material: 0,
        });
        let d = validate_scene(&s);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DiagnosticKind::DegeneratePolygon);

        let mut s = box_room([4.0, 3.0, 2.5], Material::wood());
        s.facets.push(Facet {
            vertices: vec![
                Point3::new(5.0, 0.0, 0.0),
                Point3::new(6.0, 0.0, 0.0),
                Point3::new(6.0, 1.0, 0.0),
            ],
            material: 0,
        });
        let d = validate_scene(&s);
        assert_eq!(d, vec![Diagnostic { facet: 6, kind: DiagnosticKind::OutOfBounds }]);
    }

    #[test]
    fn paper_grids() {
        let ru = GridSpec {
            origin: [0.0, 0.0, 0.0],
            rows: 2,
            cols: 12,
            row_step: 3.0,
            col_step: 1.0,
            height: 2.2,
        };
        let pts = generate_grid(&ru);
        assert_eq!(pts.len(), 24);
        assert!(pts.iter().all(|p| p.z == 2.2));
        let ue = GridSpec {
            rows: 4,
            cols: 13,
            height: 0.8,
            ..ru
        };
        let pts = generate_grid(&ue);
        assert_eq!(pts.len(), 52);
        assert!(pts.iter().all(|p| p.z == 0.8));
        // row-major
        assert_eq!(pts[1], Point3::new(1.0, 0.0, 0.8));
        assert_eq!(pts[13], Point3::new(0.0, 3.0, 0.8));
    }

    #[test]
    fn single_point_grid() {
        let g = GridSpec {
            origin: [1.5, -2.0, 7.0],
            rows: 1,
            cols: 1,
            row_step: 1.0,
            col_step: 1.0,
            height: 0.8,
        };
        assert_eq!(generate_grid(&g), vec![Point3::new(1.5, -2.0, 0.8)]);
    }

    proptest! {
        #[test]
        fn grid_count(rows in 1usize..30, cols in 1usize..30, rs in 0.01f64..5.0, cs in 0.01f64..5.0, h in 0.0f64..4.0) {
            let g = GridSpec { origin: [0.0; 3], rows, cols, row_step: rs, col_step: cs, height: h };
            prop_assert_eq!(generate_grid(&g).len(), rows * cols);
        }

        #[test]
        fn text_round_trip(quads in proptest::collection::vec(
            (-50.0f64..50.0, -50.0f64..50.0, -50.0f64..50.0, 0.1f64..10.0, 0.1f64..10.0, 0usize..3), 0..8)
        ) {
            let facets: Vec<Facet> = quads.iter().map(|&(x, y, z, w, h, axis)| {
                let v = match axis {
                    0 => vec![Point3::new(x, y, z), Point3::new(x + w, y, z), Point3::new(x + w, y + h, z), Point3::new(x, y + h, z)],
                    1 => vec![Point3::new(x, y, z), Point3::new(x + w, y, z), Point3::new(x + w, y, z + h), Point3::new(x, y, z + h)],
                    _ => vec![Point3::new(x, y, z), Point3::new(x, y + w, z), Point3::new(x, y + w, z + h)],
                };
                Facet { vertices: v, material: 0 }
            }).collect();
            let scene = Scene::new(vec![Material::wood()], facets).unwrap();
            let again = parse(&scene.to_text()).unwrap();
            prop_assert_eq!(again.facets.len(), scene.facets.len());
            for (a, b) in scene.facets.iter().zip(&again.facets) {
                for (p, q) in a.vertices.iter().zip(&b.vertices) {
                    prop_assert!((p - q).norm() <= 1e-9);
                }
            }
        }
    }
}
