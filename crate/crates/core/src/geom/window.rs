use serde::{Deserialize, Serialize};

use super::body::ConvexBody;
use super::polygon::ConvexPolygon;
use super::polyhedron::ConvexPolyhedron;
use super::vector::Vector;
use crate::error::{Error, Result};

/// Edge treatment applied when simulating inside a bounded window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum EdgeMode {
    #[default]
    None,
    /// Simulate generators on the window dilated by `margin`.
    Plus { margin: f64 },
    /// Identify opposite sides of a box window (torus).
    Periodic,
}

/// Bounded simulation domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window<B> {
    pub shape: B,
    #[serde(default)]
    pub edge_mode: EdgeMode,
}

pub type Window2 = Window<ConvexPolygon>;
pub type Window3 = Window<ConvexPolyhedron>;

impl<B: ConvexBody> Window<B> {
    pub fn new(shape: B, edge_mode: EdgeMode) -> Result<Self> {
        match edge_mode {
            EdgeMode::Plus { margin } if !(margin >= 0.0 && margin.is_finite()) => {
                return Err(Error::Parameter(format!("plus-sampling margin must be >= 0, got {margin}")))
            }
            EdgeMode::Periodic if !shape.is_axis_box() => {
                return Err(Error::Parameter("periodic edge treatment requires an axis-aligned box window".into()))
            }
            _ => {}
        }
        Ok(Self { shape, edge_mode })
    }

    pub fn content(&self) -> f64 {
        self.shape.content()
    }

    pub fn bounds(&self) -> (B::Point, B::Point) {
        self.shape.bounds()
    }

    /// Side lengths of the bounding box.
    pub fn extent(&self) -> B::Point {
        let (lo, hi) = self.bounds();
        hi - lo
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.edge_mode, EdgeMode::Periodic)
    }

    pub fn margin(&self) -> f64 {
        match self.edge_mode {
            EdgeMode::Plus { margin } => margin,
            _ => 0.0,
        }
    }

    /// Region on which generators are simulated: the shape itself, or its
    /// bounding box dilated by the plus-sampling margin.
    pub fn effective_shape(&self) -> B {
        match self.edge_mode {
            EdgeMode::Plus { margin } if margin > 0.0 => {
                let (lo, hi) = self.bounds();
                let m = B::Point::from_coords(&vec![margin; B::Point::DIM]);
                B::axis_box(lo - m, hi + m)
            }
            _ => self.shape.clone(),
        }
    }

    /// Concentric sub-box with the given linear fraction of the bounding box.
    pub fn shrunk_box(&self, fraction: f64) -> B {
        let (lo, hi) = self.bounds();
        let c = (lo + hi) * 0.5;
        let h = (hi - lo) * (0.5 * fraction);
        B::axis_box(c - h, c + h)
    }
}

impl Window<ConvexPolygon> {
    pub fn unit_square() -> Self {
        Self { shape: ConvexPolygon::unit_square(), edge_mode: EdgeMode::None }
    }

    pub fn square(side: f64, edge_mode: EdgeMode) -> Result<Self> {
        if !(side > 0.0) {
            return Err(Error::Parameter(format!("window side must be positive, got {side}")));
        }
        Self::new(ConvexPolygon::rect(super::vec2(0.0, 0.0), super::vec2(side, side)), edge_mode)
    }
}

impl Window<ConvexPolyhedron> {
    pub fn unit_cube() -> Self {
        Self { shape: ConvexPolyhedron::unit_cube(), edge_mode: EdgeMode::None }
    }

    pub fn cube(side: f64, edge_mode: EdgeMode) -> Result<Self> {
        if !(side > 0.0) {
            return Err(Error::Parameter(format!("window side must be positive, got {side}")));
        }
        Self::new(ConvexPolyhedron::cuboid(super::Vec3::zero(), super::vec3(side, side, side)), edge_mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn plus_mode_dilates_box() {
        let w = Window::new(ConvexPolygon::unit_square(), EdgeMode::Plus { margin: 0.2 }).unwrap();
        assert_relative_eq!(w.effective_shape().area(), 1.96, epsilon = 1e-12);
    }

    #[test]
    fn periodic_needs_box() {
        let tri = ConvexPolygon::new(vec![
            super::super::vec2(0.0, 0.0),
            super::super::vec2(1.0, 0.0),
            super::super::vec2(0.0, 1.0),
        ])
        .unwrap();
        assert!(Window::new(tri, EdgeMode::Periodic).is_err());
        assert!(Window::new(ConvexPolygon::unit_square(), EdgeMode::Plus { margin: -1.0 }).is_err());
    }
}
