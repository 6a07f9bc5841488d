use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::merge::PointMerger;
use crate::geom::{ConvexPolyhedron, Vec3, Vector, COINCIDENCE_TOL};

/// Face lattice of a spatial (face-to-face) tessellation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct FaceLattice3 {
    pub vertices: Vec<Vec3>,
    pub vertex_boundary: Vec<bool>,
    pub edges: Vec<[usize; 2]>,
    pub edge_segment: Vec<(Vec3, Vec3)>,
    pub edge_boundary: Vec<bool>,
    pub edge_facets: Vec<usize>,
    pub facets: Vec<Vec<usize>>,
    /// Facet corner coordinates in the coordinates of the first cell that produced it.
    pub facet_points: Vec<Vec<Vec3>>,
    pub facet_cells: Vec<Vec<usize>>,
    pub facet_boundary: Vec<bool>,
    pub cell_vertices: Vec<Vec<usize>>,
    pub cell_facets: Vec<Vec<usize>>,
    pub cell_edges: Vec<Vec<usize>>,
    pub vertex_cells: Vec<Vec<usize>>,
    pub periodic: Option<(Vec3, Vec3)>,
    pub tol: f64,
}

/// True when `p` lies within `tol` of a facet plane of `k` (and inside `k`).
pub fn on_polyhedron_boundary(k: &ConvexPolyhedron, p: Vec3, tol: f64) -> bool {
    if !k.contains(p, tol) {
        return false;
    }
    (0..k.faces().len()).any(|f| {
        let n = k.face_normal(f);
        let q = k.vertices()[k.faces()[f][0]];
        (p - q).dot(n).abs() <= tol
    })
}

impl FaceLattice3 {
    pub fn build(cells: &[ConvexPolyhedron], domain: &ConvexPolyhedron, periodic: Option<(Vec3, Vec3)>) -> Self {
        let (dlo, dhi) = domain.bbox();
        let ext = dhi - dlo;
        let scale = ext.x.max(ext.y).max(ext.z).max(1.0);
        let tol = COINCIDENCE_TOL * scale;
        let mut merger = PointMerger::new(tol, periodic);
        let mut cell_vertices = Vec::with_capacity(cells.len());
        for c in cells {
            cell_vertices.push(c.vertices().iter().map(|&v| merger.insert(v)).collect::<Vec<usize>>());
        }
        let vertices = merger.into_points();
        let nv = vertices.len();

        let mut facets: Vec<Vec<usize>> = Vec::new();
        let mut facet_points: Vec<Vec<Vec3>> = Vec::new();
        let mut facet_cells: Vec<Vec<usize>> = Vec::new();
        let mut facet_map: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut cell_facets = vec![Vec::new(); cells.len()];
        let mut edges: Vec<[usize; 2]> = Vec::new();
        let mut edge_segment = Vec::new();
        let mut edge_facets: Vec<usize> = Vec::new();
        let mut edge_map: HashMap<(usize, usize), usize> = HashMap::new();
        let mut cell_edges = vec![Vec::new(); cells.len()];
        for (ci, c) in cells.iter().enumerate() {
            let ids = &cell_vertices[ci];
            for face in c.faces() {
                let mut loop_ids: Vec<usize> = face.iter().map(|&i| ids[i]).collect();
                loop_ids.dedup();
                if loop_ids.len() > 1 && loop_ids[0] == loop_ids[loop_ids.len() - 1] {
                    loop_ids.pop();
                }
                if loop_ids.len() < 3 {
                    continue;
                }
                let mut key = loop_ids.clone();
                key.sort_unstable();
                let f = match facet_map.get(&key) {
                    Some(&f) => f,
                    None => {
                        facets.push(loop_ids.clone());
                        facet_points.push(face.iter().map(|&i| c.vertices()[i]).collect());
                        facet_cells.push(Vec::new());
                        let f = facets.len() - 1;
                        facet_map.insert(key, f);
                        for k in 0..face.len() {
                            let (i, j) = (face[k], face[(k + 1) % face.len()]);
                            let (a, b) = (ids[i], ids[j]);
                            if a == b {
                                continue;
                            }
                            let e = *edge_map.entry((a.min(b), a.max(b))).or_insert_with(|| {
                                edges.push([a, b]);
                                edge_segment.push((c.vertices()[i], c.vertices()[j]));
                                edge_facets.push(0);
                                edges.len() - 1
                            });
                            edge_facets[e] += 1;
                        }
                        f
                    }
                };
                facet_cells[f].push(ci);
                cell_facets[ci].push(f);
                for k in 0..face.len() {
                    let (a, b) = (ids[face[k]], ids[face[(k + 1) % face.len()]]);
                    if let Some(&e) = edge_map.get(&(a.min(b), a.max(b))) {
                        if !cell_edges[ci].contains(&e) {
                            cell_edges[ci].push(e);
                        }
                    }
                }
            }
        }
        let mut vertex_cells = vec![Vec::new(); nv];
        for (ci, vs) in cell_vertices.iter().enumerate() {
            for &v in vs {
                if !vertex_cells[v].contains(&ci) {
                    vertex_cells[v].push(ci);
                }
            }
        }

        let bnd = |p: Vec3| periodic.is_none() && on_polyhedron_boundary(domain, p, tol);
        let vertex_boundary: Vec<bool> = vertices.iter().map(|&v| bnd(v)).collect();
        let edge_boundary: Vec<bool> = edges
            .iter()
            .zip(&edge_segment)
            .map(|(&[a, b], &(p, q))| vertex_boundary[a] && vertex_boundary[b] && bnd((p + q) * 0.5))
            .collect();
        let facet_boundary: Vec<bool> = facets
            .iter()
            .zip(&facet_points)
            .zip(&facet_cells)
            .map(|((ids, pts), cs)| {
                periodic.is_none()
                    && (cs.len() < 2 || {
                        let c = pts.iter().fold(Vec3::zero(), |a, &b| a + b) * (1.0 / pts.len() as f64);
                        ids.iter().all(|&v| vertex_boundary[v]) && bnd(c)
                    })
            })
            .collect();

        FaceLattice3 {
            vertices,
            vertex_boundary,
            edges,
            edge_segment,
            edge_boundary,
            edge_facets,
            facets,
            facet_points,
            facet_cells,
            facet_boundary,
            cell_vertices,
            cell_facets,
            cell_edges,
            vertex_cells,
            periodic,
            tol,
        }
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let (p, q) = self.edge_segment[e];
        p.dist(q)
    }

    pub fn facet_area(&self, f: usize) -> f64 {
        polygon_area_3d(&self.facet_points[f])
    }
}

/// Area of a planar polygon in space.
pub fn polygon_area_3d(pts: &[Vec3]) -> f64 {
    if pts.len() < 3 {
        return 0.0;
    }
    let o = pts[0];
    let mut s = Vec3::zero();
    for k in 1..pts.len() - 1 {
        s += (pts[k] - o).cross(pts[k + 1] - o);
    }
    0.5 * s.norm()
}
