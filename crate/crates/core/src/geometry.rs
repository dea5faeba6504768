//! Small vector-geometry helpers shared by the scene and the tracer.

use nalgebra::{Point3 as NaPoint3, Vector3};

pub type Point3 = NaPoint3<f64>;
pub type Vec3 = Vector3<f64>;

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn new(min: Point3, max: Point3) -> Self {
        Self { min, max }
    }

    /// A box containing all of space; used for scenes without declared bounds.
    pub fn unbounded() -> Self {
        Self {
            min: Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            max: Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point3>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let (mut min, mut max) = (first, first);
        for p in it {
            for k in 0..3 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        Some(Self { min, max })
    }

    pub fn contains(&self, p: &Point3, tol: f64) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] - tol && p[k] <= self.max[k] + tol)
    }

    pub fn is_bounded(&self) -> bool {
        (0..3).all(|k| self.min[k].is_finite() && self.max[k].is_finite())
    }
}

/// Oriented plane `normal · x = offset` with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub normal: Vec3,
    pub offset: f64,
}

impl Plane {
    /// Best-fit plane through a polygon (Newell's method). Returns `None` for
    /// polygons with (numerically) zero area.
    pub fn from_polygon(vertices: &[Point3]) -> Option<(Self, f64)> {
        if vertices.len() < 3 {
            return None;
        }
        let mut n = Vec3::zeros();
        let mut centroid = Vec3::zeros();
        for (i, a) in vertices.iter().enumerate() {
            let b = vertices[(i + 1) % vertices.len()];
            n.x += (a.y - b.y) * (a.z + b.z);
            n.y += (a.z - b.z) * (a.x + b.x);
            n.z += (a.x - b.x) * (a.y + b.y);
            centroid += a.coords;
        }
        let twice_area = n.norm();
        if !(twice_area > 1e-12) {
            return None;
        }
        let normal = n / twice_area;
        centroid /= vertices.len() as f64;
        Some((
            Self {
                normal,
                offset: normal.dot(&centroid),
            },
            0.5 * twice_area,
        ))
    }

    pub fn signed_distance(&self, p: &Point3) -> f64 {
        self.normal.dot(&p.coords) - self.offset
    }

    pub fn mirror(&self, p: &Point3) -> Point3 {
        p - self.normal * (2.0 * self.signed_distance(p))
    }

    /// Intersection parameter `t` of the segment `a + t (b - a)` with the plane,
    /// or `None` when the segment is parallel to it.
    pub fn segment_parameter(&self, a: &Point3, b: &Point3) -> Option<f64> {
        let da = self.signed_distance(a);
        let db = self.signed_distance(b);
        let denom = da - db;
        if denom.abs() < 1e-15 {
            None
        } else {
            Some(da / denom)
        }
    }
}

/// Planar polygon prepared for fast point containment: vertices projected to
/// the two coordinates with the largest normal-orthogonal extent.
#[derive(Debug, Clone)]
pub struct PlanarPolygon {
    pub plane: Plane,
    pub area: f64,
    axes: (usize, usize),
    ring: Vec<(f64, f64)>,
}

impl PlanarPolygon {
    pub fn new(vertices: &[Point3]) -> Option<Self> {
        let (plane, area) = Plane::from_polygon(vertices)?;
        let n = plane.normal.map(f64::abs);
        let drop = if n.x >= n.y && n.x >= n.z {
            0
        } else if n.y >= n.z {
            1
        } else {
            2
        };
        let axes = match drop {
            0 => (1, 2),
            1 => (2, 0),
            _ => (0, 1),
        };
        let ring = vertices.iter().map(|v| (v[axes.0], v[axes.1])).collect();
        Some(Self {
            plane,
            area,
            axes,
            ring,
        })
    }

    /// Crossing-number containment test for a point assumed to lie in the plane.
    pub fn contains(&self, p: &Point3) -> bool {
        let (px, py) = (p[self.axes.0], p[self.axes.1]);
        let mut inside = false;
        let n = self.ring.len();
        let mut j = n - 1;
        for i in 0..n {
            let (xi, yi) = self.ring[i];
            let (xj, yj) = self.ring[j];
            if (yi > py) != (yj > py) {
                let x_cross = xi + (py - yi) * (xj - xi) / (yj - yi);
                if px < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }
}
