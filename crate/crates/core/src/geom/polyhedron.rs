use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::hyperplane::{Plane, Side};
use super::vector::{vec3, Vec3, Vector};
use crate::error::{Error, Result};

/// Convex polyhedron: vertex list plus facet loops, each counterclockwise
/// when seen from outside (outward normal by the right-hand rule).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolyhedron {
    vertices: Vec<Vec3>,
    faces: Vec<Vec<usize>>,
}

fn eps_for(points: &[Vec3]) -> f64 {
    let m = points
        .iter()
        .fold(1.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()).max(p.z.abs()));
    1e-12 * m
}

impl ConvexPolyhedron {
    pub fn new(vertices: Vec<Vec3>, faces: Vec<Vec<usize>>) -> Result<Self> {
        let p = Self { vertices, faces };
        p.validate()?;
        Ok(p)
    }

    pub fn cuboid(lo: Vec3, hi: Vec3) -> Self {
        let v = vec![
            vec3(lo.x, lo.y, lo.z),
            vec3(hi.x, lo.y, lo.z),
            vec3(hi.x, hi.y, lo.z),
            vec3(lo.x, hi.y, lo.z),
            vec3(lo.x, lo.y, hi.z),
            vec3(hi.x, lo.y, hi.z),
            vec3(hi.x, hi.y, hi.z),
            vec3(lo.x, hi.y, hi.z),
        ];
        let f = vec![
            vec![0, 3, 2, 1],
            vec![4, 5, 6, 7],
            vec![0, 1, 5, 4],
            vec![2, 3, 7, 6],
            vec![1, 2, 6, 5],
            vec![0, 4, 7, 3],
        ];
        Self { vertices: v, faces: f }
    }

    pub fn unit_cube() -> Self {
        Self::cuboid(Vec3::zero(), vec3(1.0, 1.0, 1.0))
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face_points(&self, f: usize) -> Vec<Vec3> {
        self.faces[f].iter().map(|&i| self.vertices[i]).collect()
    }

    /// Area-weighted normal of a facet (length = area).
    fn face_area_vector(&self, f: usize) -> Vec3 {
        let loop_ = &self.faces[f];
        let o = self.vertices[loop_[0]];
        let mut acc = Vec3::zero();
        for w in 1..loop_.len() - 1 {
            let a = self.vertices[loop_[w]] - o;
            let b = self.vertices[loop_[w + 1]] - o;
            acc += a.cross(b);
        }
        acc * 0.5
    }

    pub fn face_normal(&self, f: usize) -> Vec3 {
        self.face_area_vector(f).normalized()
    }

    pub fn face_area(&self, f: usize) -> f64 {
        self.face_area_vector(f).norm()
    }

    pub fn face_centroid(&self, f: usize) -> Vec3 {
        let loop_ = &self.faces[f];
        let o = self.vertices[loop_[0]];
        let mut acc = Vec3::zero();
        let mut total = 0.0;
        let n = self.face_normal(f);
        for w in 1..loop_.len() - 1 {
            let a = self.vertices[loop_[w]];
            let b = self.vertices[loop_[w + 1]];
            let ar = (a - o).cross(b - o).dot(n) * 0.5;
            acc += (o + a + b) * (ar / 3.0);
            total += ar;
        }
        acc / total
    }

    pub fn volume(&self) -> f64 {
        let c = self.vertices[0];
        let mut v = 0.0;
        for loop_ in &self.faces {
            let o = self.vertices[loop_[0]] - c;
            for w in 1..loop_.len() - 1 {
                let a = self.vertices[loop_[w]] - c;
                let b = self.vertices[loop_[w + 1]] - c;
                v += o.dot(a.cross(b));
            }
        }
        v / 6.0
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    pub fn centroid(&self) -> Vec3 {
        let c = self.vertices[0];
        let mut acc = Vec3::zero();
        let mut vol = 0.0;
        for loop_ in &self.faces {
            let o = self.vertices[loop_[0]];
            for w in 1..loop_.len() - 1 {
                let a = self.vertices[loop_[w]];
                let b = self.vertices[loop_[w + 1]];
                let v = (o - c).dot((a - c).cross(b - c));
                acc += (c + o + a + b) * (v / 4.0);
                vol += v;
            }
        }
        acc / vol
    }

    /// Undirected edges as sorted vertex-index pairs with their two incident faces.
    pub fn edges(&self) -> Vec<((usize, usize), [usize; 2])> {
        let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (f, loop_) in self.faces.iter().enumerate() {
            let n = loop_.len();
            for k in 0..n {
                let (a, b) = (loop_[k], loop_[(k + 1) % n]);
                map.entry((a.min(b), a.max(b))).or_default().push(f);
            }
        }
        let mut out: Vec<_> = map
            .into_iter()
            .filter(|(_, fs)| fs.len() == 2)
            .map(|(k, fs)| (k, [fs[0], fs[1]]))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn total_edge_length(&self) -> f64 {
        self.edges()
            .iter()
            .map(|((a, b), _)| self.vertices[*a].dist(self.vertices[*b]))
            .sum()
    }

    /// Mean width from edge lengths and exterior dihedral angles:
    /// `b = (1 / 4pi) * sum_e len(e) * angle(n1, n2)`.
    pub fn mean_width(&self) -> f64 {
        let normals: Vec<Vec3> = (0..self.faces.len()).map(|f| self.face_normal(f)).collect();
        let s: f64 = self
            .edges()
            .iter()
            .map(|((a, b), [f1, f2])| {
                let len = self.vertices[*a].dist(self.vertices[*b]);
                let c = normals[*f1].dot(normals[*f2]).clamp(-1.0, 1.0);
                len * c.acos()
            })
            .sum();
        s / (4.0 * std::f64::consts::PI)
    }

    pub fn bbox(&self) -> (Vec3, Vec3) {
        let mut lo = self.vertices[0];
        let mut hi = lo;
        for v in &self.vertices {
            lo = vec3(lo.x.min(v.x), lo.y.min(v.y), lo.z.min(v.z));
            hi = vec3(hi.x.max(v.x), hi.y.max(v.y), hi.z.max(v.z));
        }
        (lo, hi)
    }

    pub fn support(&self, u: Vec3) -> f64 {
        self.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn width(&self, u: Vec3) -> f64 {
        self.support(u) + self.support(-u)
    }

    pub fn contains(&self, p: Vec3, tol: f64) -> bool {
        (0..self.faces.len()).all(|f| {
            let n = self.face_normal(f);
            (p - self.vertices[self.faces[f][0]]).dot(n) <= tol
        })
    }

    pub fn hit_by(&self, plane: &Plane) -> bool {
        let tol = eps_for(&self.vertices);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            let d = plane.signed_distance(*v);
            lo = lo.min(d);
            hi = hi.max(d);
        }
        lo < -tol && hi > tol
    }

    pub fn translated(&self, by: Vec3) -> Self {
        Self { vertices: self.vertices.iter().map(|v| *v + by).collect(), faces: self.faces.clone() }
    }

    pub fn is_axis_box(&self) -> bool {
        if self.vertices.len() != 8 || self.faces.len() != 6 {
            return false;
        }
        let (lo, hi) = self.bbox();
        let tol = 1e-12 * (1.0 + hi.norm());
        self.vertices.iter().all(|v| {
            (0..3).all(|a| {
                (v.coord(a) - lo.coord(a)).abs() <= tol || (v.coord(a) - hi.coord(a)).abs() <= tol
            })
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertices.len() < 4 || self.faces.len() < 4 {
            return Err(Error::Geometry("polyhedron needs at least 4 vertices and 4 facets".into()));
        }
        if self.vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::Geometry("non-finite polyhedron vertex".into()));
        }
        for loop_ in &self.faces {
            if loop_.len() < 3 || loop_.iter().any(|&i| i >= self.vertices.len()) {
                return Err(Error::Geometry("malformed facet loop".into()));
            }
        }
        if self.volume() <= 0.0 {
            return Err(Error::Geometry("polyhedron must have positive volume with outward loops".into()));
        }
        let (lo, hi) = self.bbox();
        let tol = 1e-9 * (1.0 + hi.dist(lo));
        for f in 0..self.faces.len() {
            let n = self.face_normal(f);
            let base = self.vertices[self.faces[f][0]];
            if self.vertices.iter().any(|v| (*v - base).dot(n) > tol) {
                return Err(Error::Geometry("polyhedron is not convex".into()));
            }
        }
        Ok(())
    }

    /// Keeps `sign * (<x,u> - r) <= 0`; `None` when the result is empty or a sliver.
    pub fn clip(&self, plane: &Plane, side: Side) -> Option<ConvexPolyhedron> {
        let s = side.sign();
        let tol = eps_for(&self.vertices);
        let d: Vec<f64> = self.vertices.iter().map(|v| s * plane.signed_distance(*v)).collect();
        if d.iter().all(|&x| x <= tol) {
            return Some(self.clone());
        }
        if d.iter().all(|&x| x >= -tol) {
            return None;
        }
        let mut verts: Vec<Vec3> = Vec::with_capacity(self.vertices.len() + 8);
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut on_plane: Vec<usize> = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if d[i] <= tol {
                remap[i] = verts.len();
                if d[i] >= -tol {
                    on_plane.push(verts.len());
                }
                verts.push(*v);
            }
        }
        let mut cuts: HashMap<(usize, usize), usize> = HashMap::new();
        let mut faces: Vec<Vec<usize>> = Vec::with_capacity(self.faces.len() + 1);
        let mut cap_exists = false;
        for loop_ in &self.faces {
            let n = loop_.len();
            let mut out: Vec<usize> = Vec::with_capacity(n + 2);
            for k in 0..n {
                let (a, b) = (loop_[k], loop_[(k + 1) % n]);
                if d[a] <= tol {
                    out.push(remap[a]);
                }
                if (d[a] < -tol && d[b] > tol) || (d[a] > tol && d[b] < -tol) {
                    let key = (a.min(b), a.max(b));
                    let idx = *cuts.entry(key).or_insert_with(|| {
                        let t = d[a] / (d[a] - d[b]);
                        verts.push(self.vertices[a] + (self.vertices[b] - self.vertices[a]) * t);
                        on_plane.push(verts.len() - 1);
                        verts.len() - 1
                    });
                    out.push(idx);
                }
            }
            out.dedup();
            while out.len() > 1 && out[0] == out[out.len() - 1] {
                out.pop();
            }
            if out.len() >= 3 {
                if out.iter().all(|i| on_plane.contains(i)) {
                    cap_exists = true;
                }
                faces.push(out);
            }
        }
        on_plane.sort_unstable();
        on_plane.dedup();
        if !cap_exists && on_plane.len() >= 3 {
            let outward = plane.normal * s;
            let centre = on_plane.iter().fold(Vec3::zero(), |a, &i| a + verts[i]) / on_plane.len() as f64;
            let e1 = outward.any_orthogonal();
            let e2 = outward.cross(e1);
            let mut ring: Vec<(f64, usize)> = on_plane
                .iter()
                .map(|&i| {
                    let r = verts[i] - centre;
                    (r.dot(e2).atan2(r.dot(e1)), i)
                })
                .collect();
            ring.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut cap: Vec<usize> = ring.into_iter().map(|(_, i)| i).collect();
            cap.dedup_by(|a, b| verts[*a].dist(verts[*b]) <= tol);
            if cap.len() >= 3 {
                faces.push(cap);
            }
        }
        let piece = compact(verts, faces)?;
        if piece.faces.len() < 4 || piece.volume() <= 1e-12 * self.volume() {
            return None;
        }
        Some(piece)
    }

    pub fn split(&self, plane: &Plane) -> (Option<ConvexPolyhedron>, Option<ConvexPolyhedron>) {
        (self.clip(plane, Side::Below), self.clip(plane, Side::Above))
    }

    pub fn intersect(&self, other: &ConvexPolyhedron) -> Option<ConvexPolyhedron> {
        let mut cur = self.clone();
        for f in 0..other.faces.len() {
            let n = other.face_normal(f);
            let plane = Plane::through(other.vertices[other.faces[f][0]], n).ok()?;
            cur = cur.clip(&plane, Side::Below)?;
        }
        Some(cur)
    }
}

/// Drops unreferenced vertices and degenerate loops, reindexing the rest.
fn compact(verts: Vec<Vec3>, faces: Vec<Vec<usize>>) -> Option<ConvexPolyhedron> {
    let mut used = vec![usize::MAX; verts.len()];
    let mut out_v = Vec::new();
    let mut out_f = Vec::with_capacity(faces.len());
    for mut l in faces {
        if l.len() < 3 {
            continue;
        }
        for i in l.iter_mut() {
            if used[*i] == usize::MAX {
                used[*i] = out_v.len();
                out_v.push(verts[*i]);
            }
            *i = used[*i];
        }
        out_f.push(l);
    }
    if out_v.len() < 4 {
        return None;
    }
    Some(ConvexPolyhedron { vertices: out_v, faces: out_f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cube_measures() {
        let c = ConvexPolyhedron::unit_cube();
        c.validate().unwrap();
        assert_relative_eq!(c.volume(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(c.surface_area(), 6.0, epsilon = 1e-15);
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.edges().len(), 12);
        assert_relative_eq!(c.mean_width(), 1.5, epsilon = 1e-14);
        let g = c.centroid();
        assert_relative_eq!(g.x, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn clip_diagonal_halves_the_cube() {
        let c = ConvexPolyhedron::unit_cube();
        let h = Plane::new(vec3(1.0, 1.0, 1.0), 1.5).unwrap();
        let lower = c.clip(&h, Side::Below).unwrap();
        lower.validate().unwrap();
        assert_relative_eq!(lower.volume(), 0.5, epsilon = 1e-13);
        let upper = c.clip(&h, Side::Above).unwrap();
        assert_relative_eq!(upper.volume() + lower.volume(), 1.0, epsilon = 1e-13);
        // hexagonal cap
        assert_eq!(lower.faces().len(), 7);
    }

    #[test]
    fn clip_through_edges_keeps_valid_loops() {
        let c = ConvexPolyhedron::unit_cube();
        let h = Plane::new(vec3(1.0, 1.0, 0.0), 1.0).unwrap();
        let prism = c.clip(&h, Side::Below).unwrap();
        prism.validate().unwrap();
        assert_relative_eq!(prism.volume(), 0.5, epsilon = 1e-14);
        assert_eq!(prism.vertices().len(), 6);
        assert_eq!(prism.faces().len(), 5);
    }

    #[test]
    fn clip_on_face_plane_is_identity_or_empty() {
        let c = ConvexPolyhedron::unit_cube();
        let h = Plane::new(vec3(0.0, 0.0, 1.0), 1.0).unwrap();
        assert_eq!(c.clip(&h, Side::Below).unwrap(), c);
        assert!(c.clip(&h, Side::Above).is_none());
    }
}
