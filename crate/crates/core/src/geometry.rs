//! Planar geometry primitives. All lengths are meters.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

/// Tolerance for positional invariants (disk membership, length bookkeeping).
pub const TOL_GEO: f64 = 1e-6;

/// Tolerance for the segment speed check, in m/s.
pub const TOL_SPEED: f64 = 1e-9;

/// A horizontal ground-plane coordinate.
///
/// Serialized as a two-element array `[x, y]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point2D) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, other: Point2D) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Point2D> {
        let n = self.norm();
        (n > 0.0).then(|| self * (1.0 / n))
    }

    /// Counter-clockwise rotation by 90 degrees.
    pub fn perp(self) -> Point2D {
        Point2D::new(-self.y, self.x)
    }

    pub fn lerp(self, other: Point2D, s: f64) -> Point2D {
        self + (other - self) * s
    }

    pub fn from_polar(center: Point2D, radius: f64, angle: f64) -> Point2D {
        let (sin, cos) = angle.sin_cos();
        Point2D::new(center.x + radius * cos, center.y + radius * sin)
    }
}

impl From<[f64; 2]> for Point2D {
    fn from([x, y]: [f64; 2]) -> Self {
        Point2D::new(x, y)
    }
}

impl From<Point2D> for [f64; 2] {
    fn from(p: Point2D) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point2D {
    type Output = Point2D;
    fn add(self, rhs: Point2D) -> Point2D {
        Point2D::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2D {
    type Output = Point2D;
    fn sub(self, rhs: Point2D) -> Point2D {
        Point2D::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2D {
    type Output = Point2D;
    fn mul(self, rhs: f64) -> Point2D {
        Point2D::new(self.x * rhs, self.y * rhs)
    }
}

/// Euclidean distance.
pub fn distance(a: Point2D, b: Point2D) -> f64 {
    (b - a).norm()
}

/// Sum of consecutive distances along `points`.
pub fn polyline_length<I>(points: I) -> f64
where
    I: IntoIterator<Item = Point2D>,
{
    let mut iter = points.into_iter();
    let Some(mut prev) = iter.next() else {
        return 0.0;
    };
    let mut total = 0.0;
    for p in iter {
        total += distance(prev, p);
        prev = p;
    }
    total
}

/// Parameter `s` in `[0, 1]` of the point of segment `[a, b]` closest to `p`.
pub fn project_onto_segment(p: Point2D, a: Point2D, b: Point2D) -> f64 {
    let d = b - a;
    let len_sq = d.norm_sq();
    if len_sq == 0.0 {
        return 0.0;
    }
    ((p - a).dot(d) / len_sq).clamp(0.0, 1.0)
}

pub fn closest_point_on_segment(p: Point2D, a: Point2D, b: Point2D) -> Point2D {
    a.lerp(b, project_onto_segment(p, a, b))
}

pub fn point_segment_distance(p: Point2D, a: Point2D, b: Point2D) -> f64 {
    distance(p, closest_point_on_segment(p, a, b))
}

/// Smallest `s` in `[0, 1]` such that `a + s (b - a)` lies in the closed disk,
/// or `None` when the segment misses it.
pub fn first_disk_entry(a: Point2D, b: Point2D, center: Point2D, radius: f64) -> Option<f64> {
    let f = a - center;
    let c = f.norm_sq() - radius * radius;
    if c <= 0.0 {
        return Some(0.0);
    }
    let d = b - a;
    let qa = d.norm_sq();
    if qa == 0.0 {
        return None;
    }
    let qb = f.dot(d);
    let disc = qb * qb - qa * c;
    if disc < 0.0 {
        return None;
    }
    // Smaller root, written to avoid cancellation when qb < 0.
    let s = if qb < 0.0 {
        c / (-qb + disc.sqrt())
    } else {
        (-qb - disc.sqrt()) / qa
    };
    (0.0..=1.0).contains(&s).then_some(s)
}

/// Orthonormal frame whose first axis points from `origin` towards `toward`.
///
/// Falls back to the world x-axis when the two points coincide.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub origin: Point2D,
    pub u: Point2D,
    pub v: Point2D,
}

impl Frame {
    pub fn along(origin: Point2D, toward: Point2D) -> Self {
        let u = (toward - origin).normalized().unwrap_or(Point2D::new(1.0, 0.0));
        Frame { origin, u, v: u.perp() }
    }

    pub fn to_local(&self, p: Point2D) -> Point2D {
        let d = p - self.origin;
        Point2D::new(d.dot(self.u), d.dot(self.v))
    }

    pub fn to_world(&self, local: Point2D) -> Point2D {
        self.origin + self.u * local.x + self.v * local.y
    }
}
