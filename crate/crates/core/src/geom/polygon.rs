use serde::{Deserialize, Serialize};

use super::hyperplane::{Line, Side};
use super::vector::{vec2, Vec2, Vector};
use crate::error::{Error, Result};

/// Relative threshold below which a clipped piece counts as a sliver.
pub const SLIVER_REL: f64 = 1e-12;

/// Convex polygon stored as a counterclockwise vertex ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

fn eps_for(points: &[Vec2]) -> f64 {
    let m = points.iter().fold(1.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()));
    1e-12 * m
}

impl ConvexPolygon {
    /// Validates a counterclockwise convex ring.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        let p = Self { vertices };
        p.validate()?;
        Ok(p)
    }

    /// Wraps a ring known to be convex and counterclockwise.
    pub fn from_ccw_unchecked(vertices: Vec<Vec2>) -> Self {
        Self { vertices }
    }

    /// Convex hull of an arbitrary point set (monotone chain); `None` when degenerate.
    pub fn hull(points: &[Vec2]) -> Option<Self> {
        let mut pts: Vec<Vec2> = points.to_vec();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup();
        if pts.len() < 3 {
            return None;
        }
        let mut lower: Vec<Vec2> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 {
                let n = lower.len();
                if (lower[n - 1] - lower[n - 2]).cross(p - lower[n - 2]) <= 0.0 {
                    lower.pop();
                } else {
                    break;
                }
            }
            lower.push(p);
        }
        let mut upper: Vec<Vec2> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 {
                let n = upper.len();
                if (upper[n - 1] - upper[n - 2]).cross(p - upper[n - 2]) <= 0.0 {
                    upper.pop();
                } else {
                    break;
                }
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        (lower.len() >= 3).then_some(Self { vertices: lower })
    }

    pub fn rect(lo: Vec2, hi: Vec2) -> Self {
        Self { vertices: vec![lo, vec2(hi.x, lo.y), hi, vec2(lo.x, hi.y)] }
    }

    pub fn unit_square() -> Self {
        Self::rect(vec2(0.0, 0.0), vec2(1.0, 1.0))
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vec2> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Iterator over directed sides `(a, b)`.
    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(Error::Geometry(format!("polygon needs at least 3 vertices, got {n}")));
        }
        if self.vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::Geometry("non-finite polygon vertex".into()));
        }
        if self.area() <= 0.0 {
            return Err(Error::Geometry("polygon ring must be counterclockwise with positive area".into()));
        }
        let tol = 1e-9 * (1.0 + self.diameter());
        for (i, &p) in self.vertices.iter().enumerate() {
            let q = self.vertices[(i + 1) % n];
            if p.dist(q) <= tol {
                return Err(Error::Geometry("repeated polygon vertex".into()));
            }
            let side = (q - p).normalized();
            for &v in &self.vertices {
                if side.cross(v - p) < -tol {
                    return Err(Error::Geometry("polygon is not convex".into()));
                }
            }
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let o = self.vertices[0];
        let mut s = 0.0;
        for i in 1..n - 1 {
            s += (self.vertices[i] - o).cross(self.vertices[i + 1] - o);
        }
        0.5 * s
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    /// Center of gravity.
    pub fn centroid(&self) -> Vec2 {
        let o = self.vertices[0];
        let mut acc = Vec2::zero();
        let mut a2 = 0.0;
        for i in 1..self.vertices.len() - 1 {
            let p = self.vertices[i] - o;
            let q = self.vertices[i + 1] - o;
            let w = p.cross(q);
            acc += (p + q) * w;
            a2 += w;
        }
        o + acc / (3.0 * a2)
    }

    pub fn bbox(&self) -> (Vec2, Vec2) {
        let mut lo = self.vertices[0];
        let mut hi = lo;
        for v in &self.vertices {
            lo = vec2(lo.x.min(v.x), lo.y.min(v.y));
            hi = vec2(hi.x.max(v.x), hi.y.max(v.y));
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.dist(*b));
            }
        }
        d
    }

    /// Support function `max <x, u>`.
    pub fn support(&self, u: Vec2) -> f64 {
        self.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Width in direction `u` (unit).
    pub fn width(&self, u: Vec2) -> f64 {
        self.support(u) + self.support(-u)
    }

    /// Vertex extreme in `dir`; ties broken by the perpendicular coordinate.
    pub fn extreme_point(&self, dir: Vec2) -> Vec2 {
        let perp = dir.perp();
        let tol = eps_for(&self.vertices);
        let mut best = self.vertices[0];
        for &v in &self.vertices[1..] {
            let d = (v - best).dot(dir);
            if d > tol || (d.abs() <= tol && (v - best).dot(perp) < 0.0) {
                best = v;
            }
        }
        best
    }

    /// Smallest enclosing circle of the vertex set (center, radius).
    pub fn enclosing_circle(&self) -> (Vec2, f64) {
        smallest_enclosing_circle(&self.vertices)
    }

    /// Closed containment with tolerance `tol`.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        self.edges().all(|(a, b)| {
            let e = b - a;
            e.cross(p - a) >= -tol * e.norm()
        })
    }

    pub fn on_boundary(&self, p: Vec2, tol: f64) -> bool {
        self.edges().any(|(a, b)| point_segment_distance(p, a, b) <= tol)
    }

    /// True when the line meets the polygon in more than a single point.
    pub fn hit_by(&self, line: &Line) -> bool {
        let tol = eps_for(&self.vertices);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            let d = line.signed_distance(*v);
            lo = lo.min(d);
            hi = hi.max(d);
        }
        lo < -tol && hi > tol
    }

    /// Keeps `sign * (<x,u> - r) <= 0`. Returns `None` for an empty or sliver result.
    pub fn clip(&self, line: &Line, side: Side) -> Option<ConvexPolygon> {
        let s = side.sign();
        let tol = eps_for(&self.vertices);
        let d: Vec<f64> = self.vertices.iter().map(|v| s * line.signed_distance(*v)).collect();
        if d.iter().all(|&x| x <= tol) {
            return Some(self.clone());
        }
        if d.iter().all(|&x| x >= -tol) {
            return None;
        }
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 2);
        for i in 0..n {
            let j = (i + 1) % n;
            let (a, b) = (self.vertices[i], self.vertices[j]);
            let (da, db) = (d[i], d[j]);
            if da <= tol {
                out.push(a);
            }
            if (da < -tol && db > tol) || (da > tol && db < -tol) {
                let t = da / (da - db);
                out.push(a + (b - a) * t);
            }
        }
        out.dedup_by(|a, b| a.dist(*b) <= tol);
        while out.len() > 1 && out[0].dist(out[out.len() - 1]) <= tol {
            out.pop();
        }
        if out.len() < 3 {
            return None;
        }
        let piece = ConvexPolygon { vertices: out };
        if piece.area() <= SLIVER_REL * self.area() {
            return None;
        }
        Some(piece)
    }

    /// Splits by a line into the `Below` and `Above` parts.
    pub fn split(&self, line: &Line) -> (Option<ConvexPolygon>, Option<ConvexPolygon>) {
        (self.clip(line, Side::Below), self.clip(line, Side::Above))
    }

    /// Intersection of two convex polygons.
    pub fn intersect(&self, other: &ConvexPolygon) -> Option<ConvexPolygon> {
        let mut cur = self.clone();
        for (a, b) in other.edges() {
            // interior of a ccw polygon lies to the left of each side
            let line = Line::through(a, (b - a).perp()).ok()?;
            cur = cur.clip(&line, Side::Above)?;
        }
        Some(cur)
    }

    /// The chord cut out by a line, if the line crosses the interior.
    pub fn chord(&self, line: &Line) -> Option<(Vec2, Vec2)> {
        if !self.hit_by(line) {
            return None;
        }
        let dir = line.direction();
        let base = line.normal * line.offset;
        let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
        for (a, b) in self.edges() {
            let inward = (b - a).perp();
            // points x = base + t dir with inward.(x - a) >= 0
            let c = inward.dot(dir);
            let k = inward.dot(base - a);
            if c.abs() < 1e-300 {
                if k < 0.0 {
                    return None;
                }
                continue;
            }
            let t = -k / c;
            if c > 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
        (t1 > t0).then(|| (base + dir * t0, base + dir * t1))
    }

    pub fn translated(&self, by: Vec2) -> ConvexPolygon {
        ConvexPolygon { vertices: self.vertices.iter().map(|v| *v + by).collect() }
    }

    pub fn scaled(&self, factor: f64) -> ConvexPolygon {
        ConvexPolygon { vertices: self.vertices.iter().map(|v| *v * factor).collect() }
    }

    /// Isoperimetric shape factor `4 pi A / P^2`.
    pub fn roundness(&self) -> f64 {
        let p = self.perimeter();
        4.0 * std::f64::consts::PI * self.area() / (p * p)
    }

    /// Is the polygon an axis-aligned rectangle?
    pub fn is_axis_box(&self) -> bool {
        if self.vertices.len() != 4 {
            return false;
        }
        let (lo, hi) = self.bbox();
        let tol = 1e-12 * (1.0 + hi.x.abs().max(hi.y.abs()));
        self.vertices.iter().all(|v| {
            ((v.x - lo.x).abs() <= tol || (v.x - hi.x).abs() <= tol)
                && ((v.y - lo.y).abs() <= tol || (v.y - hi.y).abs() <= tol)
        })
    }
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let e = b - a;
    let l2 = e.norm2();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(e) / l2).clamp(0.0, 1.0);
    p.dist(a + e * t)
}

fn circle2(a: Vec2, b: Vec2) -> (Vec2, f64) {
    let c = (a + b) * 0.5;
    (c, c.dist(a))
}

fn circle3(a: Vec2, b: Vec2, c: Vec2) -> (Vec2, f64) {
    match circumcenter(a, b, c) {
        Some(o) => (o, o.dist(a)),
        None => {
            let cands = [circle2(a, b), circle2(a, c), circle2(b, c)];
            cands.into_iter().max_by(|x, y| x.1.total_cmp(&y.1)).unwrap()
        }
    }
}

/// Circumcenter of a triangle, `None` for collinear input.
pub fn circumcenter(a: Vec2, b: Vec2, c: Vec2) -> Option<Vec2> {
    let (b, c) = (b - a, c - a);
    let d = 2.0 * b.cross(c);
    if d.abs() < 1e-300 {
        return None;
    }
    let (b2, c2) = (b.norm2(), c.norm2());
    Some(a + vec2(c.y * b2 - b.y * c2, b.x * c2 - c.x * b2) / d)
}

/// Iterative Welzl-style minimal enclosing circle; fine for small point sets.
pub fn smallest_enclosing_circle(pts: &[Vec2]) -> (Vec2, f64) {
    let inside = |c: &(Vec2, f64), p: Vec2| p.dist(c.0) <= c.1 * (1.0 + 1e-12) + 1e-15;
    let mut c = (pts[0], 0.0);
    for i in 1..pts.len() {
        if inside(&c, pts[i]) {
            continue;
        }
        c = (pts[i], 0.0);
        for j in 0..i {
            if inside(&c, pts[j]) {
                continue;
            }
            c = circle2(pts[i], pts[j]);
            for k in 0..j {
                if !inside(&c, pts[k]) {
                    c = circle3(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn measures_of_basic_shapes() {
        let sq = ConvexPolygon::unit_square();
        assert_relative_eq!(sq.area(), 1.0);
        assert_relative_eq!(sq.perimeter(), 4.0);
        assert_eq!(sq.len(), 4);
        let tri = ConvexPolygon::new(vec![vec2(0.0, 0.0), vec2(1.0, 0.0), vec2(0.0, 1.0)]).unwrap();
        assert_relative_eq!(tri.area(), 0.5);
        assert_relative_eq!(tri.perimeter(), 2.0 + 2f64.sqrt());
        assert_eq!(tri.len(), 3);
    }

    #[test]
    fn clip_half_and_miss() {
        let sq = ConvexPolygon::unit_square();
        let h = Line::new(vec2(1.0, 0.0), 0.5).unwrap();
        let left = sq.clip(&h, Side::Below).unwrap();
        assert_relative_eq!(left.area(), 0.5, epsilon = 1e-15);
        let far = Line::new(vec2(1.0, 0.0), 2.0).unwrap();
        assert_eq!(sq.clip(&far, Side::Below).unwrap(), sq);
        assert!(sq.clip(&far, Side::Above).is_none());
    }

    #[test]
    fn clip_through_vertex_keeps_no_duplicates() {
        let sq = ConvexPolygon::unit_square();
        let diag = Line::new(vec2(1.0, 1.0), 1.0).unwrap();
        let t = sq.clip(&diag, Side::Below).unwrap();
        assert_eq!(t.len(), 3);
        assert_relative_eq!(t.area(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rejects_clockwise_and_nonconvex() {
        assert!(ConvexPolygon::new(vec![vec2(0.0, 0.0), vec2(0.0, 1.0), vec2(1.0, 0.0)]).is_err());
        let dart = vec![vec2(0.0, 0.0), vec2(2.0, 0.0), vec2(1.0, 0.2), vec2(1.0, 2.0)];
        assert!(ConvexPolygon::new(dart).is_err());
    }

    #[test]
    fn chord_of_square() {
        let sq = ConvexPolygon::unit_square();
        let h = Line::new(vec2(0.0, 1.0), 0.25).unwrap();
        let (a, b) = sq.chord(&h).unwrap();
        assert_relative_eq!(a.dist(b), 1.0, epsilon = 1e-12);
        assert_relative_eq!(a.y, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn enclosing_circle_of_square() {
        let (c, r) = ConvexPolygon::unit_square().enclosing_circle();
        assert_relative_eq!(c.x, 0.5, epsilon = 1e-12);
        assert_relative_eq!(c.y, 0.5, epsilon = 1e-12);
        assert_relative_eq!(r, 0.5f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn intersect_overlapping_squares() {
        let a = ConvexPolygon::unit_square();
        let b = a.translated(vec2(0.5, 0.5));
        assert_relative_eq!(a.intersect(&b).unwrap().area(), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn hull_drops_interior_points() {
        let pts = [vec2(0.0, 0.0), vec2(1.0, 0.0), vec2(0.3, 0.3), vec2(1.0, 1.0), vec2(0.0, 1.0)];
        let h = ConvexPolygon::hull(&pts).unwrap();
        assert_eq!(h.len(), 4);
        assert_relative_eq!(h.area(), 1.0);
    }
}
