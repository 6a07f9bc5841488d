use serde::{Deserialize, Serialize};

use super::polygon::ConvexPolygon;
use super::polyhedron::ConvexPolyhedron;
use super::vector::{vec2, vec3, Vec2, Vec3, Vector};

/// Translation-covariant point assigned to each face for counting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CentroidRule {
    #[default]
    GravityCenter,
    CircumballCenter,
    /// Vertex extreme in the given direction (lexicographic tie-break).
    ExtremePoint(Vec<f64>),
}

impl CentroidRule {
    pub fn polygon(&self, p: &ConvexPolygon) -> Vec2 {
        match self {
            CentroidRule::GravityCenter => p.centroid(),
            CentroidRule::CircumballCenter => p.enclosing_circle().0,
            CentroidRule::ExtremePoint(d) => {
                p.extreme_point(vec2(d.first().copied().unwrap_or(1.0), d.get(1).copied().unwrap_or(0.0)))
            }
        }
    }

    pub fn polyhedron(&self, p: &ConvexPolyhedron) -> Vec3 {
        match self {
            CentroidRule::GravityCenter => p.centroid(),
            CentroidRule::CircumballCenter => smallest_enclosing_ball(p.vertices()).0,
            CentroidRule::ExtremePoint(d) => {
                let c = |i: usize| d.get(i).copied().unwrap_or(if i == 0 { 1.0 } else { 0.0 });
                extreme_point_3d(p.vertices(), vec3(c(0), c(1), c(2)))
            }
        }
    }

    /// Centroid of a point set that lies on a segment or planar convex face.
    pub fn points(&self, pts: &[Vec3]) -> Vec3 {
        match self {
            CentroidRule::GravityCenter => pts.iter().fold(Vec3::zero(), |a, &b| a + b) * (1.0 / pts.len() as f64),
            CentroidRule::CircumballCenter => smallest_enclosing_ball(pts).0,
            CentroidRule::ExtremePoint(d) => {
                let c = |i: usize| d.get(i).copied().unwrap_or(if i == 0 { 1.0 } else { 0.0 });
                extreme_point_3d(pts, vec3(c(0), c(1), c(2)))
            }
        }
    }
}

fn extreme_point_3d(pts: &[Vec3], dir: Vec3) -> Vec3 {
    let e1 = dir.any_orthogonal();
    let e2 = dir.cross(e1);
    let key = |v: Vec3| (v.dot(dir), -v.dot(e1), -v.dot(e2));
    let mut best = pts[0];
    for &v in &pts[1..] {
        let (a, b) = (key(v), key(best));
        let d = a.0 - b.0;
        let tol = 1e-12 * (1.0 + a.0.abs());
        if d > tol || (d.abs() <= tol && (a.1, a.2) > (b.1, b.2)) {
            best = v;
        }
    }
    best
}

/// Minimal enclosing ball of a 3D point set (iterative Welzl).
pub fn smallest_enclosing_ball(pts: &[Vec3]) -> (Vec3, f64) {
    // Work relative to the first point for translation covariance.
    let o = pts[0];
    let q: Vec<Vec3> = pts.iter().map(|&p| p - o).collect();
    let inside = |c: &(Vec3, f64), p: Vec3| p.dist(c.0) <= c.1 * (1.0 + 1e-12) + 1e-15;
    let mut c = (q[0], 0.0);
    for i in 1..q.len() {
        if inside(&c, q[i]) {
            continue;
        }
        c = (q[i], 0.0);
        for j in 0..i {
            if inside(&c, q[j]) {
                continue;
            }
            c = ball2(q[i], q[j]);
            for k in 0..j {
                if inside(&c, q[k]) {
                    continue;
                }
                c = ball3(q[i], q[j], q[k]);
                for l in 0..k {
                    if !inside(&c, q[l]) {
                        c = ball4(q[i], q[j], q[k], q[l]).unwrap_or(c);
                    }
                }
            }
        }
    }
    (c.0 + o, c.1)
}

fn ball2(a: Vec3, b: Vec3) -> (Vec3, f64) {
    let c = (a + b) * 0.5;
    (c, c.dist(a))
}

fn ball3(a: Vec3, b: Vec3, c: Vec3) -> (Vec3, f64) {
    let (u, v) = (b - a, c - a);
    let n = u.cross(v);
    let n2 = n.norm2();
    if n2 < 1e-300 {
        let pairs = [ball2(a, b), ball2(a, c), ball2(b, c)];
        return pairs.into_iter().fold((a, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    }
    let centre = a + (v.cross(n) * u.norm2() + n.cross(u) * v.norm2()) * (0.5 / n2);
    (centre, centre.dist(a))
}

fn ball4(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> Option<(Vec3, f64)> {
    let (u, v, w) = (b - a, c - a, d - a);
    let det = u.dot(v.cross(w));
    if det.abs() < 1e-300 {
        return None;
    }
    let centre = a + (v.cross(w) * u.norm2() + w.cross(u) * v.norm2() + u.cross(v) * w.norm2()) * (0.5 / det);
    Some((centre, centre.dist(a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rules_on_unit_square() {
        let sq = ConvexPolygon::unit_square();
        assert_eq!(CentroidRule::GravityCenter.polygon(&sq), vec2(0.5, 0.5));
        let c = CentroidRule::CircumballCenter.polygon(&sq);
        assert_relative_eq!(c.x, 0.5, epsilon = 1e-12);
        let e = CentroidRule::ExtremePoint(vec![1.0, 0.0]).polygon(&sq);
        assert_eq!(e, vec2(1.0, 0.0));
    }

    #[test]
    fn enclosing_ball_of_cube() {
        let (c, r) = smallest_enclosing_ball(ConvexPolyhedron::unit_cube().vertices());
        assert_relative_eq!(c.x, 0.5, epsilon = 1e-12);
        assert_relative_eq!(c.z, 0.5, epsilon = 1e-12);
        assert_relative_eq!(r, 3f64.sqrt() / 2.0, epsilon = 1e-12);
    }
}
