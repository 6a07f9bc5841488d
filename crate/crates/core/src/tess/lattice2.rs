use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::merge::{BucketGrid, PointMerger};
use crate::geom::{classify_vertex, ConvexPolygon, Vec2, VertexKind, Vector, COINCIDENCE_TOL};

/// Explicit face lattice of a planar tessellation.
///
/// Vertices include π-vertices (corners of one cell lying inside a side of
/// another); edges are the resulting K-segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct FaceLattice2 {
    pub vertices: Vec<Vec2>,
    pub vertex_boundary: Vec<bool>,
    pub vertex_pi: Vec<bool>,
    pub edges: Vec<[usize; 2]>,
    /// Edge endpoints in cell coordinates (unwrapped on the torus).
    pub edge_segment: Vec<(Vec2, Vec2)>,
    pub edge_cells: Vec<Vec<usize>>,
    pub edge_boundary: Vec<bool>,
    /// Cell boundary as lattice vertex ids, π-vertices included.
    pub cell_ring: Vec<Vec<usize>>,
    pub cell_corners: Vec<Vec<usize>>,
    pub cell_edges: Vec<Vec<usize>>,
    pub cell_neighbors: Vec<Vec<usize>>,
    pub vertex_edges: Vec<Vec<usize>>,
    pub vertex_cells: Vec<Vec<usize>>,
    /// Distinct interior cell sides (J-segments) as corner id pairs.
    pub sides: Vec<[usize; 2]>,
    /// Maximal collinear chain (I-segment) id per edge; `usize::MAX` on the boundary.
    pub edge_chain: Vec<usize>,
    pub n_chains: usize,
    pub periodic: Option<(Vec2, Vec2)>,
    pub tol: f64,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl FaceLattice2 {
    /// Builds the lattice of `cells` covering `domain` (or the torus `periodic = (lo, extent)`).
    pub fn build(cells: &[ConvexPolygon], domain: &ConvexPolygon, periodic: Option<(Vec2, Vec2)>, tol_angle: f64) -> Self {
        let (dlo, dhi) = domain.bbox();
        let scale = (dhi.x - dlo.x).max(dhi.y - dlo.y).max(1.0);
        let tol = COINCIDENCE_TOL * scale;
        let mut merger = PointMerger::new(tol, periodic);
        let cell_corners: Vec<Vec<usize>> =
            cells.iter().map(|c| c.vertices().iter().map(|&v| merger.insert(v)).collect()).collect();
        let vertices = merger.points().to_vec();
        let nv = vertices.len();
        let mut vertex_pi = vec![false; nv];

        // Refine each ring with vertices lying strictly inside its sides.
        let mut rings: Vec<Vec<(usize, Vec2)>> = Vec::with_capacity(cells.len());
        let grid = if periodic.is_none() {
            let (mut lo, mut hi) = (dlo, dhi);
            for v in &vertices {
                lo = Vec2 { x: lo.x.min(v.x), y: lo.y.min(v.y) };
                hi = Vec2 { x: hi.x.max(v.x), y: hi.y.max(v.y) };
            }
            Some(BucketGrid::new(&vertices, lo, hi))
        } else {
            None
        };
        let mut cand = Vec::new();
        for (ci, c) in cells.iter().enumerate() {
            let vs = c.vertices();
            let ids = &cell_corners[ci];
            let mut ring = Vec::with_capacity(vs.len());
            for k in 0..vs.len() {
                let (a, b) = (ids[k], ids[(k + 1) % vs.len()]);
                let (p, q) = (vs[k], vs[(k + 1) % vs.len()]);
                ring.push((a, p));
                if let Some(g) = &grid {
                    let pad = Vec2 { x: tol, y: tol };
                    let lo = Vec2 { x: p.x.min(q.x), y: p.y.min(q.y) } - pad;
                    let hi = Vec2 { x: p.x.max(q.x), y: p.y.max(q.y) } + pad;
                    g.query(lo, hi, &mut cand);
                    let d = q - p;
                    let len = d.norm();
                    let mut inner: Vec<(f64, usize)> = Vec::new();
                    for &v in &cand {
                        if v == a || v == b {
                            continue;
                        }
                        let w = vertices[v] - p;
                        let t = w.dot(d) / len;
                        let off = d.cross(w).abs() / len;
                        if off <= tol && t > tol && t < len - tol {
                            inner.push((t, v));
                        }
                    }
                    inner.sort_by(|x, y| x.0.total_cmp(&y.0));
                    for (_, v) in inner {
                        vertex_pi[v] = true;
                        ring.push((v, vertices[v]));
                    }
                }
            }
            ring.dedup_by(|x, y| x.0 == y.0);
            if ring.len() > 1 && ring[0].0 == ring[ring.len() - 1].0 {
                ring.pop();
            }
            rings.push(ring);
        }

        let mut edges: Vec<[usize; 2]> = Vec::new();
        let mut edge_segment = Vec::new();
        let mut edge_cells: Vec<Vec<usize>> = Vec::new();
        let mut edge_map: HashMap<(usize, usize), usize> = HashMap::new();
        let mut cell_edges = vec![Vec::new(); cells.len()];
        let mut vertex_cells = vec![Vec::new(); nv];
        for (ci, ring) in rings.iter().enumerate() {
            let n = ring.len();
            for k in 0..n {
                let (a, pa) = ring[k];
                let (b, pb) = ring[(k + 1) % n];
                vertex_cells[a].push(ci);
                if a == b {
                    continue;
                }
                let key = (a.min(b), a.max(b));
                let e = *edge_map.entry(key).or_insert_with(|| {
                    edges.push([a, b]);
                    edge_segment.push((pa, pb));
                    edge_cells.push(Vec::new());
                    edges.len() - 1
                });
                if !edge_cells[e].contains(&ci) {
                    edge_cells[e].push(ci);
                }
                cell_edges[ci].push(e);
            }
        }
        for vc in vertex_cells.iter_mut() {
            vc.sort_unstable();
            vc.dedup();
        }
        let mut vertex_edges = vec![Vec::new(); nv];
        for (e, [a, b]) in edges.iter().enumerate() {
            vertex_edges[*a].push(e);
            vertex_edges[*b].push(e);
        }

        let vertex_boundary: Vec<bool> = if periodic.is_some() {
            vec![false; nv]
        } else {
            vertices.iter().map(|&v| domain.on_boundary(v, tol)).collect()
        };
        let edge_boundary: Vec<bool> = edges
            .iter()
            .zip(&edge_segment)
            .zip(&edge_cells)
            .map(|((&[a, b], &(p, q)), cs)| {
                periodic.is_none()
                    && (cs.len() < 2
                        || (vertex_boundary[a] && vertex_boundary[b] && domain.on_boundary((p + q) * 0.5, tol)))
            })
            .collect();
        for (v, pi) in vertex_pi.iter_mut().enumerate() {
            *pi &= !vertex_boundary[v];
        }

        let mut cell_neighbors = vec![Vec::new(); cells.len()];
        for cs in &edge_cells {
            for &x in cs {
                for &y in cs {
                    if x != y && !cell_neighbors[x].contains(&y) {
                        cell_neighbors[x].push(y);
                    }
                }
            }
        }
        for n in cell_neighbors.iter_mut() {
            n.sort_unstable();
        }

        let mut sides: Vec<[usize; 2]> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (ci, c) in cells.iter().enumerate() {
            let ids = &cell_corners[ci];
            let vs = c.vertices();
            for k in 0..ids.len() {
                let (a, b) = (ids[k], ids[(k + 1) % ids.len()]);
                if a == b {
                    continue;
                }
                let mid = (vs[k] + vs[(k + 1) % vs.len()]) * 0.5;
                let boundary =
                    periodic.is_none() && vertex_boundary[a] && vertex_boundary[b] && domain.on_boundary(mid, tol);
                if !boundary && seen.insert((a.min(b), a.max(b))) {
                    sides.push([a, b]);
                }
            }
        }

        // Maximal collinear chains through interior vertices.
        let ne = edges.len();
        let mut parent: Vec<usize> = (0..ne).collect();
        let dir_at = |e: usize, v: usize| {
            let (p, q) = edge_segment[e];
            if edges[e][0] == v {
                (q - p).normalized()
            } else {
                (p - q).normalized()
            }
        };
        for v in 0..nv {
            if vertex_boundary[v] {
                continue;
            }
            let es: Vec<usize> = vertex_edges[v].iter().copied().filter(|&e| !edge_boundary[e]).collect();
            for i in 0..es.len() {
                for j in i + 1..es.len() {
                    let (u, w) = (dir_at(es[i], v), dir_at(es[j], v));
                    if u.cross(w).abs().atan2(-u.dot(w)).abs() <= tol_angle {
                        let (ri, rj) = (find(&mut parent, es[i]), find(&mut parent, es[j]));
                        if ri != rj {
                            parent[ri.max(rj)] = ri.min(rj);
                        }
                    }
                }
            }
        }
        let mut chain_id = HashMap::new();
        let mut edge_chain = vec![usize::MAX; ne];
        for e in 0..ne {
            if edge_boundary[e] {
                continue;
            }
            let r = find(&mut parent, e);
            let next = chain_id.len();
            edge_chain[e] = *chain_id.entry(r).or_insert(next);
        }
        let n_chains = chain_id.len();

        FaceLattice2 {
            vertices,
            vertex_boundary,
            vertex_pi,
            edges,
            edge_segment,
            edge_cells,
            edge_boundary,
            cell_ring: rings.into_iter().map(|r| r.into_iter().map(|x| x.0).collect()).collect(),
            cell_corners,
            cell_edges,
            cell_neighbors,
            vertex_edges,
            vertex_cells,
            sides,
            edge_chain,
            n_chains,
            periodic,
            tol,
        }
    }

    /// Unit directions of the edges leaving vertex `v`.
    pub fn edge_directions(&self, v: usize) -> Vec<Vec2> {
        self.vertex_edges[v]
            .iter()
            .map(|&e| {
                let (p, q) = self.edge_segment[e];
                if self.edges[e][0] == v {
                    (q - p).normalized()
                } else {
                    (p - q).normalized()
                }
            })
            .collect()
    }

    pub fn classify(&self, v: usize, tol_angle: f64) -> Option<VertexKind> {
        classify_vertex(&self.edge_directions(v), tol_angle).ok()
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let (p, q) = self.edge_segment[e];
        p.dist(q)
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(|&v| !self.vertex_boundary[v])
    }

    pub fn interior_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| !self.edge_boundary[e])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{vec2, DEFAULT_TOL_ANGLE};

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> ConvexPolygon {
        ConvexPolygon::rect(vec2(x0, y0), vec2(x1, y1))
    }

    #[test]
    fn three_chord_configuration() {
        // Vertical chord at x=0.5, then two horizontal chords on each side at different heights.
        // The vertical I-segment is split by two T-vertices into 3 K-segments.
        let cells = vec![rect(0.0, 0.0, 0.5, 0.4), rect(0.0, 0.4, 0.5, 1.0), rect(0.5, 0.0, 1.0, 0.7), rect(0.5, 0.7, 1.0, 1.0)];
        let l = FaceLattice2::build(&cells, &ConvexPolygon::unit_square(), None, DEFAULT_TOL_ANGLE);
        let interior: Vec<usize> = l.interior_vertices().collect();
        assert_eq!(interior.len(), 2);
        for &v in &interior {
            assert_eq!(l.classify(v, DEFAULT_TOL_ANGLE), Some(VertexKind::T));
            assert!(l.vertex_pi[v]);
        }
        assert_eq!(l.interior_edges().count(), 5);
        assert_eq!(l.n_chains, 3);
        let vertical: Vec<usize> = l
            .interior_edges()
            .filter(|&e| {
                let (p, q) = l.edge_segment[e];
                (p.x - 0.5).abs() < 1e-12 && (q.x - 0.5).abs() < 1e-12
            })
            .collect();
        assert_eq!(vertical.len(), 3);
        assert!(vertical.iter().all(|&e| l.edge_chain[e] == l.edge_chain[vertical[0]]));
        assert_eq!(l.sides.len(), 6);
    }

    #[test]
    fn cross_has_x_vertex() {
        let cells = vec![rect(0.0, 0.0, 0.5, 0.5), rect(0.5, 0.0, 1.0, 0.5), rect(0.0, 0.5, 0.5, 1.0), rect(0.5, 0.5, 1.0, 1.0)];
        let l = FaceLattice2::build(&cells, &ConvexPolygon::unit_square(), None, DEFAULT_TOL_ANGLE);
        let interior: Vec<usize> = l.interior_vertices().collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(l.classify(interior[0], DEFAULT_TOL_ANGLE), Some(VertexKind::X));
        assert!(!l.vertex_pi[interior[0]]);
        assert_eq!(l.n_chains, 2);
    }
}
