use serde::{Deserialize, Serialize};

use super::vector::{Vec2, Vec3, Vector};
use crate::error::{Error, Result};

/// The hyperplane `{x : <x, normal> = offset}` with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane<V> {
    pub normal: V,
    pub offset: f64,
}

pub type Line = Hyperplane<Vec2>;
pub type Plane = Hyperplane<Vec3>;

/// Which closed half-space of a hyperplane to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `<x, u> - r <= 0`
    Below,
    /// `<x, u> - r >= 0`
    Above,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Below => 1.0,
            Side::Above => -1.0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Below => Side::Above,
            Side::Above => Side::Below,
        }
    }
}

impl<V: Vector> Hyperplane<V> {
    /// Builds a hyperplane from a nonzero normal; the normal is rescaled to unit length.
    pub fn new(normal: V, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !(n.is_finite() && n > 0.0) || !offset.is_finite() {
            return Err(Error::Geometry(format!("invalid hyperplane normal {normal:?}")));
        }
        Ok(Self { normal: normal * (1.0 / n), offset: offset / n })
    }

    /// Hyperplane through `point` with the given unit normal.
    pub fn through(point: V, normal: V) -> Result<Self> {
        let h = Self::new(normal, 0.0)?;
        Ok(Self { offset: point.dot(h.normal), ..h })
    }

    pub fn signed_distance(&self, p: V) -> f64 {
        p.dot(self.normal) - self.offset
    }

    pub fn is_unit(&self) -> bool {
        (self.normal.norm() - 1.0).abs() <= 1e-12
    }

    pub fn translated(&self, by: V) -> Self {
        Self { normal: self.normal, offset: self.offset + by.dot(self.normal) }
    }
}

impl Line {
    /// Unit direction vector along the line.
    pub fn direction(&self) -> Vec2 {
        self.normal.perp()
    }

    /// Intersection point with another line, if not parallel.
    pub fn intersect(&self, other: &Line) -> Option<Vec2> {
        let det = self.normal.cross(other.normal);
        if det.abs() < 1e-14 {
            return None;
        }
        let x = (self.offset * other.normal.y - other.offset * self.normal.y) / det;
        let y = (self.normal.x * other.offset - other.normal.x * self.offset) / det;
        Some(Vec2 { x, y })
    }
}
