use std::collections::{BTreeSet, HashMap};

use crate::geom::{point_segment_distance, ConvexPolygon, Vec2, Vector};

/// Planar segment network whose faces become tessellation cells.
///
/// Vertices are attached to segments explicitly with a position parameter, so
/// T-junctions never depend on floating-point point location.
#[derive(Debug, Default)]
pub(crate) struct Network {
    pub points: Vec<Vec2>,
    segs: Vec<Vec<(f64, usize)>>,
    boundary: Vec<(usize, Vec2, Vec2)>,
}

impl Network {
    /// Network holding the sides of `domain` as segments.
    pub fn with_boundary(domain: &ConvexPolygon) -> Self {
        let mut n = Network::default();
        let corners: Vec<usize> = domain.vertices().iter().map(|&p| n.point(p)).collect();
        let k = corners.len();
        for i in 0..k {
            let (a, b) = (domain.vertices()[i], domain.vertices()[(i + 1) % k]);
            let s = n.segment();
            n.attach(s, 0.0, corners[i]);
            n.attach(s, a.dist(b), corners[(i + 1) % k]);
            n.boundary.push((s, a, b));
        }
        n
    }

    pub fn point(&mut self, p: Vec2) -> usize {
        self.points.push(p);
        self.points.len() - 1
    }

    pub fn segment(&mut self) -> usize {
        self.segs.push(Vec::new());
        self.segs.len() - 1
    }

    pub fn attach(&mut self, seg: usize, t: f64, v: usize) {
        self.segs[seg].push((t, v));
    }

    /// Attaches `v` to the nearest domain side.
    pub fn attach_to_boundary(&mut self, v: usize) {
        let p = self.points[v];
        let &(s, a, _) = self
            .boundary
            .iter()
            .min_by(|x, y| point_segment_distance(p, x.1, x.2).total_cmp(&point_segment_distance(p, y.1, y.2)))
            .expect("network without boundary");
        self.attach(s, p.dist(a), v);
    }

    /// Bounded faces, traced with the face on the left of each half-edge.
    pub fn cells(&self) -> Vec<ConvexPolygon> {
        let mut edges = BTreeSet::new();
        for s in &self.segs {
            let mut on = s.clone();
            on.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for w in on.windows(2) {
                let (u, v) = (w[0].1, w[1].1);
                if u != v {
                    edges.insert((u.min(v), u.max(v)));
                }
            }
        }
        let n = self.points.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            let p = self.points[u];
            list.sort_by(|&a, &b| {
                let (da, db) = (self.points[a] - p, self.points[b] - p);
                da.y.atan2(da.x).total_cmp(&db.y.atan2(db.x))
            });
        }
        let slot: HashMap<(usize, usize), usize> =
            adj.iter().enumerate().flat_map(|(u, l)| l.iter().enumerate().map(move |(k, &v)| ((u, v), k))).collect();
        let mut used: HashMap<(usize, usize), bool> = HashMap::with_capacity(slot.len());
        let mut out = Vec::new();
        for u0 in 0..n {
            for &v0 in &adj[u0] {
                if used.contains_key(&(u0, v0)) {
                    continue;
                }
                let mut ring = Vec::new();
                let (mut u, mut v) = (u0, v0);
                loop {
                    used.insert((u, v), true);
                    ring.push(u);
                    let list = &adj[v];
                    let k = slot[&(v, u)];
                    let next = list[(k + list.len() - 1) % list.len()];
                    u = v;
                    v = next;
                    if (u, v) == (u0, v0) {
                        break;
                    }
                }
                let pts: Vec<Vec2> = ring.iter().map(|&i| self.points[i]).collect();
                let area: f64 = (0..pts.len()).map(|i| pts[i].cross(pts[(i + 1) % pts.len()])).sum::<f64>() / 2.0;
                if area > 0.0 {
                    if let Some(c) = ConvexPolygon::hull(&pts) {
                        if (c.area() - area).abs() > 1e-9 * c.area().max(1e-300) {
                            log::warn!("non-convex face of area {area} replaced by its hull");
                        }
                        out.push(c);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::vec2;

    #[test]
    fn t_junction_faces() {
        let sq = ConvexPolygon::unit_square();
        let mut n = Network::with_boundary(&sq);
        // vertical crack x=0.5, then a crack from it to the right wall at y=0.3
        let a = n.point(vec2(0.5, 0.0));
        let b = n.point(vec2(0.5, 1.0));
        n.attach_to_boundary(a);
        n.attach_to_boundary(b);
        let s = n.segment();
        n.attach(s, 0.0, a);
        n.attach(s, 1.0, b);
        let c = n.point(vec2(0.5, 0.3));
        let d = n.point(vec2(1.0, 0.3));
        n.attach(s, 0.3, c);
        n.attach_to_boundary(d);
        let s2 = n.segment();
        n.attach(s2, 0.0, c);
        n.attach(s2, 0.5, d);
        let cells = n.cells();
        assert_eq!(cells.len(), 3);
        let mut areas: Vec<f64> = cells.iter().map(|c| c.area()).collect();
        areas.sort_by(f64::total_cmp);
        assert!((areas[0] - 0.15).abs() < 1e-12 && (areas[1] - 0.35).abs() < 1e-12 && (areas[2] - 0.5).abs() < 1e-12);
    }
}
