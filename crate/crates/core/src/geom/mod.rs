//! Geometric kernel: vectors, hyperplanes, convex polygons and polyhedra,
//! windows, direction roses, chord sampling and vertex classification.

mod body;
mod centroid;
mod chord;
mod hyperplane;
mod polygon;
mod polyhedron;
mod rose;
mod vector;
mod vertex;
mod window;

pub use body::{measures, ConvexBody, Measures};
pub use centroid::CentroidRule;
pub use chord::sample_chord;
pub use hyperplane::{Hyperplane, Line, Plane, Side};
pub use polygon::{circumcenter, point_segment_distance, smallest_enclosing_circle, ConvexPolygon};
pub use polyhedron::ConvexPolyhedron;
pub use rose::{DirectionRose, SphericalRose};
pub use vector::{vec2, vec3, Vec2, Vec3, Vector};
pub use vertex::{classify_vertex, VertexKind, DEFAULT_TOL_ANGLE};
pub use window::{EdgeMode, Window, Window2, Window3};

/// Geometric coincidence tolerance in window units.
pub const COINCIDENCE_TOL: f64 = 1e-9;
