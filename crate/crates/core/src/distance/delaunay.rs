use std::collections::HashMap;

use robust::{incircle, orient2d, Coord};

use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, Vec2, Window};
use crate::process::{periodic_copies, PointPattern};
use crate::tess::{PlanarTessellation, PointMerger};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Tri {
    v: [usize; 3],
    nb: [usize; 3],
    alive: bool,
}

/// Delaunay triangulation as counterclockwise vertex triples.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    pub triangles: Vec<[usize; 3]>,
    /// Number of exactly cocircular configurations met during insertion.
    pub cocircular: usize,
}

fn c(p: Vec2) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

/// Incremental Bowyer–Watson triangulation with exact orientation and incircle tests.
///
/// Input points must be pairwise distinct. Cocircular ties are resolved by keeping
/// the existing triangle, which still yields a valid Delaunay triangulation.
pub fn delaunay_triangles(points: &[Vec2]) -> Result<Triangulation> {
    let n = points.len();
    if n < 3 {
        return Err(Error::Parameter(format!("triangulation needs at least 3 points, got {n}")));
    }
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = Vec2 { x: lo.x.min(p.x), y: lo.y.min(p.y) };
        hi = Vec2 { x: hi.x.max(p.x), y: hi.y.max(p.y) };
    }
    let s = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let m = (lo + hi) * 0.5;
    let mut pts = points.to_vec();
    pts.push(Vec2 { x: m.x - 200.0 * s, y: m.y - 100.0 * s });
    pts.push(Vec2 { x: m.x + 200.0 * s, y: m.y - 100.0 * s });
    pts.push(Vec2 { x: m.x, y: m.y + 200.0 * s });
    let mut tris = vec![Tri { v: [n, n + 1, n + 2], nb: [NONE; 3], alive: true }];

    // Snake order over a coarse grid keeps the point-location walk short.
    let g = ((n as f64).sqrt() / 2.0).ceil().max(1.0);
    let key = |p: Vec2| {
        let gx = (((p.x - lo.x) / s * g).floor()).clamp(0.0, g - 1.0) as i64;
        let gy = (((p.y - lo.y) / s * g).floor()).clamp(0.0, g - 1.0) as i64;
        let gx = if gy % 2 == 0 { gx } else { g as i64 - 1 - gx };
        (gy, gx)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| key(points[a]).cmp(&key(points[b])).then(a.cmp(&b)));

    let mut stamp = vec![0u32; 1];
    let mut round = 0u32;
    let mut last = 0usize;
    let mut cocircular = 0usize;
    let mut stack = Vec::new();
    let mut cavity = Vec::new();
    for &pi in &order {
        let p = pts[pi];
        // Visibility walk.
        let mut t = last;
        let mut steps = 0usize;
        'walk: loop {
            steps += 1;
            if steps > 4 * tris.len() + 16 {
                t = (0..tris.len())
                    .find(|&k| {
                        tris[k].alive
                            && (0..3).all(|e| {
                                let tr = &tris[k];
                                orient2d(c(pts[tr.v[(e + 1) % 3]]), c(pts[tr.v[(e + 2) % 3]]), c(p)) >= 0.0
                            })
                    })
                    .ok_or_else(|| Error::Numeric("point location failed".into()))?;
                break;
            }
            let tr = &tris[t];
            for e in 0..3 {
                let (a, b) = (tr.v[(e + 1) % 3], tr.v[(e + 2) % 3]);
                if orient2d(c(pts[a]), c(pts[b]), c(p)) < 0.0 {
                    t = tr.nb[e];
                    continue 'walk;
                }
            }
            break;
        }

        round += 1;
        stamp.resize(tris.len(), 0);
        cavity.clear();
        stack.clear();
        stack.push(t);
        stamp[t] = round;
        while let Some(k) = stack.pop() {
            cavity.push(k);
            for e in 0..3 {
                let nb = tris[k].nb[e];
                if nb == NONE || stamp[nb] == round {
                    continue;
                }
                let v = tris[nb].v;
                let ic = incircle(c(pts[v[0]]), c(pts[v[1]]), c(pts[v[2]]), c(p));
                if ic == 0.0 {
                    cocircular += 1;
                }
                if ic > 0.0 {
                    stamp[nb] = round;
                    stack.push(nb);
                }
            }
        }

        let mut start_of: HashMap<usize, usize> = HashMap::new();
        let mut end_of: HashMap<usize, usize> = HashMap::new();
        let mut created = Vec::new();
        for &k in &cavity {
            for e in 0..3 {
                let nb = tris[k].nb[e];
                if nb != NONE && stamp[nb] == round {
                    continue;
                }
                let (a, b) = (tris[k].v[(e + 1) % 3], tris[k].v[(e + 2) % 3]);
                let id = tris.len();
                tris.push(Tri { v: [a, b, pi], nb: [NONE, NONE, nb], alive: true });
                if nb != NONE {
                    let o = &mut tris[nb];
                    for slot in o.nb.iter_mut() {
                        if *slot == k {
                            *slot = id;
                        }
                    }
                }
                start_of.insert(a, id);
                end_of.insert(b, id);
                created.push(id);
            }
        }
        for &id in &created {
            let [a, b, _] = tris[id].v;
            tris[id].nb[0] = start_of[&b];
            tris[id].nb[1] = end_of[&a];
        }
        for &k in &cavity {
            tris[k].alive = false;
        }
        last = *created.last().expect("cavity has a boundary");
    }
    if cocircular > 0 {
        log::warn!("{cocircular} cocircular configurations resolved by insertion order");
    }
    let triangles = tris.iter().filter(|t| t.alive && t.v.iter().all(|&v| v < n)).map(|t| t.v).collect();
    Ok(Triangulation { triangles, cocircular })
}

fn dedupe(points: &[Vec2], periodic: Option<(Vec2, Vec2)>) -> (Vec<usize>, usize) {
    let mut m = PointMerger::new(1e-9, periodic);
    let mut keep = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let before = m.points().len();
        if m.insert(p) == before {
            keep.push(i);
        }
    }
    let dropped = points.len() - keep.len();
    (keep, dropped)
}

/// Delaunay tessellation of the pattern. On a torus every triangle appears once;
/// otherwise cells are the triangles clipped to the window and cover the convex hull.
pub fn delaunay(p: &PointPattern<Vec2>, w: &Window<ConvexPolygon>) -> Result<PlanarTessellation> {
    let periodic = if w.is_periodic() {
        let (lo, hi) = w.bounds();
        Some((lo, hi - lo))
    } else {
        None
    };
    let (keep, dropped) = dedupe(&p.points, periodic);
    if dropped > 0 {
        log::warn!("merged {dropped} coincident generators");
    }
    let pts: Vec<Vec2> = keep.iter().map(|&i| p.points[i]).collect();
    let mut cells = Vec::new();
    let cocircular;
    match periodic {
        Some((lo, ext)) => {
            let copies = periodic_copies(&pts, ext);
            let all: Vec<Vec2> = copies.iter().map(|x| x.0).collect();
            let tri = delaunay_triangles(&all)?;
            cocircular = tri.cocircular;
            let hi = lo + ext;
            for t in tri.triangles {
                let v = [all[t[0]], all[t[1]], all[t[2]]];
                let g = (v[0] + v[1] + v[2]) * (1.0 / 3.0);
                if g.x >= lo.x && g.x < hi.x && g.y >= lo.y && g.y < hi.y {
                    cells.push(ConvexPolygon::from_ccw_unchecked(v.to_vec()));
                }
            }
        }
        None => {
            let tri = delaunay_triangles(&pts)?;
            cocircular = tri.cocircular;
            let dom = w.effective_shape();
            for t in tri.triangles {
                let poly = ConvexPolygon::from_ccw_unchecked(vec![pts[t[0]], pts[t[1]], pts[t[2]]]);
                if let Some(c) = poly.intersect(&dom) {
                    cells.push(c);
                }
            }
        }
    }
    let mut t = PlanarTessellation::from_cells("delaunay", w.clone(), cells);
    t.generators = Some(p.clone());
    t.diagnostics.insert("cocircular".into(), cocircular as f64);
    t.diagnostics.insert("merged_generators".into(), dropped as f64);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::voronoi;
    use crate::geom::{circumcenter, vec2, EdgeMode, Vector};
    use crate::process::{sample_poisson, Seed};

    #[test]
    fn three_points_one_triangle() {
        let t = delaunay_triangles(&[vec2(0.0, 0.0), vec2(1.0, 0.0), vec2(0.3, 0.8)]).unwrap();
        assert_eq!(t.triangles.len(), 1);
    }

    #[test]
    fn empty_circumcircles() {
        let w = Window::unit_square();
        let p = sample_poisson(&w, 200.0, &mut Seed::new(8).rng(0, "d")).unwrap();
        let t = delaunay_triangles(&p.points).unwrap();
        for tr in &t.triangles {
            let v = [p.points[tr[0]], p.points[tr[1]], p.points[tr[2]]];
            let cc = circumcenter(v[0], v[1], v[2]).unwrap();
            let r = cc.dist(v[0]);
            for (i, q) in p.points.iter().enumerate() {
                if !tr.contains(&i) {
                    assert!(q.dist(cc) > r * (1.0 - 1e-12));
                }
            }
        }
    }

    #[test]
    fn torus_counts_and_duality() {
        let w = Window::new(ConvexPolygon::unit_square(), EdgeMode::Periodic).unwrap();
        let p = sample_poisson(&w, 100.0, &mut Seed::new(12).rng(0, "pdt")).unwrap();
        let d = delaunay(&p, &w).unwrap();
        assert_eq!(d.len(), 2 * p.len());
        assert_eq!(d.lattice.vertices.len(), p.len());
        assert_eq!(d.lattice.edges.len(), 3 * p.len());
        // Every Voronoi vertex is the circumcentre of exactly one Delaunay triangle (mod the torus).
        let v = voronoi(&p, &w).unwrap();
        let merger = PointMerger::new(1e-9, Some((vec2(0.0, 0.0), vec2(1.0, 1.0))));
        let centres: Vec<Vec2> = d
            .cells
            .iter()
            .map(|c| {
                let q = c.vertices();
                merger.wrap(circumcenter(q[0], q[1], q[2]).unwrap())
            })
            .collect();
        for vv in &v.lattice.vertices {
            let hits = centres.iter().filter(|c| merger.delta(**c, *vv).norm() < 1e-9).count();
            assert_eq!(hits, 1);
        }
    }
}
