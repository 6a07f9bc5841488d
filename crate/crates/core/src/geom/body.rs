use super::hyperplane::{Hyperplane, Side};
use super::polygon::ConvexPolygon;
use super::polyhedron::ConvexPolyhedron;
use super::vector::{vec2, vec3, Vec2, Vec3, Vector};

/// Operations shared by convex polygons and polyhedra.
pub trait ConvexBody: Clone + Send + Sync + std::fmt::Debug {
    type Point: Vector;

    fn content(&self) -> f64;
    fn boundary_content(&self) -> f64;
    fn vertex_count(&self) -> usize;
    fn gravity_center(&self) -> Self::Point;
    fn bounds(&self) -> (Self::Point, Self::Point);
    fn contains_point(&self, p: Self::Point, tol: f64) -> bool;
    fn clip_halfspace(&self, h: &Hyperplane<Self::Point>, side: Side) -> Option<Self>;
    fn crosses(&self, h: &Hyperplane<Self::Point>) -> bool;
    fn width_along(&self, u: Self::Point) -> f64;
    fn translate(&self, by: Self::Point) -> Self;
    fn is_axis_box(&self) -> bool;
    fn axis_box(lo: Self::Point, hi: Self::Point) -> Self;
    fn corner_points(&self) -> Vec<Self::Point>;

    /// A ball containing the body, centred on the bounding-box centre.
    fn bounding_ball(&self) -> (Self::Point, f64) {
        let (lo, hi) = self.bounds();
        let c = (lo + hi) * 0.5;
        let r = self.corner_points().iter().map(|v| v.dist(c)).fold(0.0, f64::max);
        (c, r)
    }
}

/// Content, boundary content and vertex count of a convex body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measures {
    pub content: f64,
    pub boundary_content: f64,
    pub n_vertices: usize,
}

pub fn measures<B: ConvexBody>(b: &B) -> Measures {
    Measures { content: b.content(), boundary_content: b.boundary_content(), n_vertices: b.vertex_count() }
}

impl ConvexBody for ConvexPolygon {
    type Point = Vec2;

    fn content(&self) -> f64 {
        self.area()
    }
    fn boundary_content(&self) -> f64 {
        self.perimeter()
    }
    fn vertex_count(&self) -> usize {
        self.len()
    }
    fn gravity_center(&self) -> Vec2 {
        self.centroid()
    }
    fn bounds(&self) -> (Vec2, Vec2) {
        self.bbox()
    }
    fn contains_point(&self, p: Vec2, tol: f64) -> bool {
        self.contains(p, tol)
    }
    fn clip_halfspace(&self, h: &Hyperplane<Vec2>, side: Side) -> Option<Self> {
        self.clip(h, side)
    }
    fn crosses(&self, h: &Hyperplane<Vec2>) -> bool {
        self.hit_by(h)
    }
    fn width_along(&self, u: Vec2) -> f64 {
        self.width(u)
    }
    fn translate(&self, by: Vec2) -> Self {
        self.translated(by)
    }
    fn is_axis_box(&self) -> bool {
        ConvexPolygon::is_axis_box(self)
    }
    fn axis_box(lo: Vec2, hi: Vec2) -> Self {
        ConvexPolygon::rect(vec2(lo.x, lo.y), vec2(hi.x, hi.y))
    }
    fn corner_points(&self) -> Vec<Vec2> {
        self.vertices().to_vec()
    }
}

impl ConvexBody for ConvexPolyhedron {
    type Point = Vec3;

    fn content(&self) -> f64 {
        self.volume()
    }
    fn boundary_content(&self) -> f64 {
        self.surface_area()
    }
    fn vertex_count(&self) -> usize {
        self.vertices().len()
    }
    fn gravity_center(&self) -> Vec3 {
        self.centroid()
    }
    fn bounds(&self) -> (Vec3, Vec3) {
        self.bbox()
    }
    fn contains_point(&self, p: Vec3, tol: f64) -> bool {
        self.contains(p, tol)
    }
    fn clip_halfspace(&self, h: &Hyperplane<Vec3>, side: Side) -> Option<Self> {
        self.clip(h, side)
    }
    fn crosses(&self, h: &Hyperplane<Vec3>) -> bool {
        self.hit_by(h)
    }
    fn width_along(&self, u: Vec3) -> f64 {
        self.width(u)
    }
    fn translate(&self, by: Vec3) -> Self {
        self.translated(by)
    }
    fn is_axis_box(&self) -> bool {
        ConvexPolyhedron::is_axis_box(self)
    }
    fn axis_box(lo: Vec3, hi: Vec3) -> Self {
        ConvexPolyhedron::cuboid(vec3(lo.x, lo.y, lo.z), vec3(hi.x, hi.y, hi.z))
    }
    fn corner_points(&self) -> Vec<Vec3> {
        self.vertices().to_vec()
    }
}
