use std::collections::HashMap;

use num_complex::Complex64;

use super::{propagate, reflection_coefficient, PathKind, RayPath, TraceConfig};
use crate::error::{Error, Result};
use crate::geometry::{PlanarPolygon, Point3, Vec3};
use crate::scene::Scene;

/// Distance below which a point counts as lying on a facet.
const ON_FACET_TOLERANCE: f64 = 1e-9;
/// Segment parameter margin excluding the segment's own endpoints from occlusion.
const ENDPOINT_MARGIN: f64 = 1e-9;
const EDGE_KEY_SCALE: f64 = 1e6;

#[derive(Debug, Clone)]
struct Edge {
    a: Point3,
    b: Point3,
    facets: Vec<usize>,
    /// In-plane unit directions from the edge into each adjacent facet.
    inward: Vec<Vec3>,
}

impl Edge {
    /// Whether `p` lies strictly inside the solid wedge spanned by two facets
    /// meeting at this edge. Free edges have no interior.
    fn wedge_contains(&self, p: &Point3) -> bool {
        if self.inward.len() != 2 {
            return false;
        }
        let u = (self.b - self.a).normalize();
        let mut v = p - self.a;
        v -= u * v.dot(&u);
        let (da, db) = (self.inward[0], self.inward[1]);
        let g = da.dot(&db);
        let det = 1.0 - g * g;
        if det.abs() < 1e-12 {
            return false;
        }
        let (va, vb) = (v.dot(&da), v.dot(&db));
        let alpha = (va - g * vb) / det;
        let beta = (vb - g * va) / det;
        alpha > 0.0 && beta > 0.0
    }

    /// Coplanar continuations (two facets meeting at 180 degrees) do not diffract.
    fn is_flat(&self) -> bool {
        self.inward.len() == 2 && self.inward[0].dot(&self.inward[1]) < -1.0 + 1e-9
    }
}

/// Path enumerator bound to one scene; reusable across TX/RX pairs.
#[derive(Debug, Clone)]
pub struct Tracer<'s> {
    scene: &'s Scene,
    cfg: TraceConfig,
    polys: Vec<PlanarPolygon>,
    edges: Vec<Edge>,
}

impl<'s> Tracer<'s> {
    pub fn new(scene: &'s Scene, cfg: TraceConfig) -> Result<Self> {
        cfg.validate()?;
        let polys = scene
            .facets
            .iter()
            .enumerate()
            .map(|(index, f)| {
                PlanarPolygon::new(&f.vertices).ok_or_else(|| Error::InvalidFacet {
                    index,
                    rule: "degenerate polygon".into(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let edges = if cfg.max_diffraction_order > 0 {
            collect_edges(scene, &polys)
        } else {
            Vec::new()
        };
        Ok(Self {
            scene,
            cfg,
            polys,
            edges,
        })
    }

    pub fn config(&self) -> &TraceConfig {
        &self.cfg
    }

    /// All propagation paths between `tx` and `rx`, sorted by kind then length.
    pub fn trace(&self, tx: &Point3, rx: &Point3) -> Result<Vec<RayPath>> {
        if (tx - rx).norm() < ON_FACET_TOLERANCE {
            return Err(Error::DegenerateGeometry("tx and rx coincide".into()));
        }
        for (name, p) in [("tx", tx), ("rx", rx)] {
            if let Some(i) = self.facet_containing(p) {
                return Err(Error::DegenerateGeometry(format!(
                    "{name} ({}, {}, {}) lies on facet {i}",
                    p.x, p.y, p.z
                )));
            }
        }

        let f = self.cfg.carrier_frequency;
        let mut paths = Vec::new();
        let direct = (rx - tx).norm();
        let los_clear = !self.segment_blocked(tx, rx, &[]);
        if los_clear {
            paths.push(RayPath {
                kind: PathKind::LineOfSight,
                interaction_points: Vec::new(),
                facets: Vec::new(),
                length: direct,
                complex_gain: propagate(direct, f),
            });
        }

        if self.cfg.max_reflections > 0 {
            let mut seq = Vec::with_capacity(self.cfg.max_reflections as usize);
            let mut images = vec![*tx];
            self.reflect(tx, rx, &mut seq, &mut images, &mut paths);
        }

        if self.cfg.max_diffraction_order > 0 && !los_clear {
            self.diffract(tx, rx, direct, &mut paths);
        }

        paths.sort_by(|a, b| {
            a.kind
                .rank()
                .cmp(&b.kind.rank())
                .then(a.length.total_cmp(&b.length))
                .then_with(|| a.facets.cmp(&b.facets))
        });
        Ok(paths)
    }

    fn facet_containing(&self, p: &Point3) -> Option<usize> {
        self.polys.iter().position(|poly| {
            poly.plane.signed_distance(p).abs() <= ON_FACET_TOLERANCE && poly.contains(p)
        })
    }

    /// True when the open segment `a`-`b` crosses a facet not listed in `skip`.
    fn segment_blocked(&self, a: &Point3, b: &Point3, skip: &[usize]) -> bool {
        self.polys.iter().enumerate().any(|(i, poly)| {
            if skip.contains(&i) {
                return false;
            }
            match poly.plane.segment_parameter(a, b) {
                Some(t) if t > ENDPOINT_MARGIN && t < 1.0 - ENDPOINT_MARGIN => {
                    poly.contains(&(a + (b - a) * t))
                }
                _ => false,
            }
        })
    }

    fn reflect(
        &self,
        tx: &Point3,
        rx: &Point3,
        seq: &mut Vec<usize>,
        images: &mut Vec<Point3>,
        out: &mut Vec<RayPath>,
    ) {
        if seq.len() == self.cfg.max_reflections as usize {
            return;
        }
        let source = *images.last().expect("images starts with tx");
        for (i, poly) in self.polys.iter().enumerate() {
            if seq.last() == Some(&i) || poly.plane.signed_distance(&source).abs() < 1e-12 {
                continue;
            }
            seq.push(i);
            images.push(poly.plane.mirror(&source));
            if let Some(path) = self.reflection_path(tx, rx, seq, images) {
                out.push(path);
            }
            self.reflect(tx, rx, seq, images, out);
            images.pop();
            seq.pop();
        }
    }

    /// Unfolds the image chain backwards from `rx` and checks that every
    /// specular point lies on its facet and every leg is unobstructed.
    fn reflection_path(
        &self,
        tx: &Point3,
        rx: &Point3,
        seq: &[usize],
        images: &[Point3],
    ) -> Option<RayPath> {
        let k = seq.len();
        let mut points = vec![Point3::origin(); k];
        let mut target = *rx;
        for m in (0..k).rev() {
            let poly = &self.polys[seq[m]];
            let image = images[m + 1];
            let t = poly.plane.segment_parameter(&image, &target)?;
            if !(t > 0.0 && t < 1.0) {
                return None;
            }
            let p = image + (target - image) * t;
            if !poly.contains(&p) {
                return None;
            }
            points[m] = p;
            target = p;
        }

        let mut prev = *tx;
        let mut prev_facet: Option<usize> = None;
        let mut length = 0.0;
        let mut coeff = Complex64::new(1.0, 0.0);
        for (m, p) in points.iter().enumerate() {
            let facet = seq[m];
            let skip: Vec<usize> = prev_facet.into_iter().chain([facet]).collect();
            if self.segment_blocked(&prev, p, &skip) {
                return None;
            }
            let leg = p - prev;
            let leg_len = leg.norm();
            if leg_len < ON_FACET_TOLERANCE {
                return None;
            }
            let cos = (leg.dot(&self.polys[facet].plane.normal) / leg_len).abs().min(1.0);
            let material = self.scene.material_of(&self.scene.facets[facet]);
            coeff *= reflection_coefficient(
                material,
                cos.acos(),
                self.cfg.polarization,
                self.cfg.carrier_frequency,
            );
            length += leg_len;
            prev = *p;
            prev_facet = Some(facet);
        }
        if self.segment_blocked(&prev, rx, &[seq[k - 1]]) {
            return None;
        }
        length += (rx - prev).norm();

        Some(RayPath {
            kind: PathKind::Reflected(k as u8),
            interaction_points: points,
            facets: seq.to_vec(),
            length,
            complex_gain: propagate(length, self.cfg.carrier_frequency) * coeff,
        })
    }

    fn diffract(&self, tx: &Point3, rx: &Point3, direct: f64, out: &mut Vec<RayPath>) {
        let lambda = self.cfg.wavelength();
        for edge in &self.edges {
            if edge.wedge_contains(tx) || edge.wedge_contains(rx) {
                continue;
            }
            let Some(p) = keller_point(edge, tx, rx) else {
                continue;
            };
            if self.segment_blocked(tx, &p, &edge.facets) || self.segment_blocked(&p, rx, &edge.facets) {
                continue;
            }
            let length = (p - tx).norm() + (rx - p).norm();
            let excess = (length - direct).max(0.0);
            let nu = 2.0 * (excess / lambda).sqrt();
            let attenuation = 10f64.powf(-knife_edge_loss_db(nu) / 20.0);
            out.push(RayPath {
                kind: PathKind::Diffracted,
                interaction_points: vec![p],
                facets: edge.facets.clone(),
                length,
                complex_gain: propagate(length, self.cfg.carrier_frequency) * attenuation,
            });
        }
    }
}

/// Point on the edge where the diffracted ray satisfies the equal-angle
/// (Keller cone) condition; `None` when it falls outside the edge segment.
fn keller_point(edge: &Edge, tx: &Point3, rx: &Point3) -> Option<Point3> {
    let axis = edge.b - edge.a;
    let len = axis.norm();
    let u = axis / len;
    let (v1, v2) = (tx - edge.a, rx - edge.a);
    let (t1, t2) = (v1.dot(&u), v2.dot(&u));
    let r1 = (v1 - u * t1).norm();
    let r2 = (v2 - u * t2).norm();
    if r1 < ON_FACET_TOLERANCE || r2 < ON_FACET_TOLERANCE {
        return None;
    }
    let t = t1 + (t2 - t1) * r1 / (r1 + r2);
    if t <= ON_FACET_TOLERANCE || t >= len - ON_FACET_TOLERANCE {
        return None;
    }
    Some(edge.a + u * t)
}

/// Single knife-edge diffraction loss in dB for the Fresnel-Kirchhoff
/// parameter `nu` (closed-form approximation, zero below `nu = -0.78`).
pub fn knife_edge_loss_db(nu: f64) -> f64 {
    if nu <= -0.78 {
        0.0
    } else {
        let x = nu - 0.1;
        6.9 + 20.0 * ((x * x + 1.0).sqrt() + x).log10()
    }
}

fn collect_edges(scene: &Scene, polys: &[PlanarPolygon]) -> Vec<Edge> {
    let key = |p: &Point3| {
        [
            (p.x * EDGE_KEY_SCALE).round() as i64,
            (p.y * EDGE_KEY_SCALE).round() as i64,
            (p.z * EDGE_KEY_SCALE).round() as i64,
        ]
    };
    let mut index: HashMap<([i64; 3], [i64; 3]), usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    for (fi, facet) in scene.facets.iter().enumerate() {
        let n = facet.vertices.len();
        let centroid = facet
            .vertices
            .iter()
            .fold(Vec3::zeros(), |acc, v| acc + v.coords)
            / n as f64;
        for i in 0..n {
            let (a, b) = (facet.vertices[i], facet.vertices[(i + 1) % n]);
            let (ka, kb) = (key(&a), key(&b));
            if ka == kb {
                continue;
            }
            let k = if ka < kb { (ka, kb) } else { (kb, ka) };
            let mut inward = polys[fi].plane.normal.cross(&(b - a)).normalize();
            if inward.dot(&(centroid - a.coords)) < 0.0 {
                inward = -inward;
            }
            match index.get(&k) {
                Some(&e) => {
                    edges[e].facets.push(fi);
                    edges[e].inward.push(inward);
                }
                None => {
                    let (a, b) = if ka < kb { (a, b) } else { (b, a) };
                    index.insert(k, edges.len());
                    edges.push(Edge {
                        a,
                        b,
                        facets: vec![fi],
                        inward: vec![inward],
                    });
                }
            }
        }
    }
    edges.retain(|e| e.facets.len() <= 2 && !e.is_flat());
    edges
}

/// Enumerates the propagation paths between two points of a scene.
pub fn trace_paths(scene: &Scene, tx: &Point3, rx: &Point3, cfg: &TraceConfig) -> Result<Vec<RayPath>> {
    Tracer::new(scene, *cfg)?.trace(tx, rx)
}
