use super::power::{power_cells, PowerCell};
use crate::error::{Error, Result};
use crate::geom::{ConvexBody, ConvexPolygon, ConvexPolyhedron, EdgeMode, Vec2, Vec3, Vector, Window};
use crate::process::{periodic_copies, PointPattern};
use crate::tess::{EmptyCell, PlanarTessellation, PointMerger, SpatialTessellation};

struct Cells<B> {
    cells: Vec<B>,
    generator: Vec<Option<usize>>,
    empty: Vec<EmptyCell>,
    merged: usize,
}

fn build_cells<B: ConvexBody>(points: &[B::Point], weights: &[f64], w: &Window<B>) -> Result<Cells<B>> {
    if points.is_empty() {
        return Err(Error::Parameter("diagram needs at least one generator".into()));
    }
    if weights.len() != points.len() {
        return Err(Error::Parameter("one weight per generator required".into()));
    }
    if points.iter().any(|p| !p.is_finite()) || weights.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parameter("generators and weights must be finite".into()));
    }
    let periodic = if w.is_periodic() {
        let (lo, hi) = w.bounds();
        Some((lo, hi - lo))
    } else {
        None
    };
    // Coincident generators: the first one keeps the cell.
    let mut merger: PointMerger<B::Point> = PointMerger::new(1e-9, periodic);
    let mut keep = Vec::with_capacity(points.len());
    let mut empty = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let before = merger.points().len();
        let id = merger.insert(p);
        if id == before {
            keep.push(i);
        } else {
            empty.push(EmptyCell { generator: i, reason: "coincident with an earlier generator".into() });
        }
    }
    let merged = empty.len();
    if merged > 0 {
        log::warn!("merged {merged} coincident generators");
    }
    let kept_pts: Vec<B::Point> = keep.iter().map(|&i| points[i]).collect();
    let kept_w: Vec<f64> = keep.iter().map(|&i| weights[i]).collect();

    let (sites, site_w, domain) = match w.edge_mode {
        EdgeMode::Periodic => {
            let (lo, hi) = w.bounds();
            let ext = hi - lo;
            let copies = periodic_copies(&kept_pts, ext);
            let sites: Vec<B::Point> = copies.iter().map(|c| c.0).collect();
            let sw: Vec<f64> = copies.iter().map(|c| kept_w[c.1]).collect();
            (sites, sw, B::axis_box(lo - ext, hi + ext))
        }
        _ => (kept_pts.clone(), kept_w.clone(), w.effective_shape()),
    };
    let targets: Vec<usize> = (0..kept_pts.len()).collect();
    let mut cells = Vec::new();
    let mut generator = Vec::new();
    for (t, c) in targets.iter().zip(power_cells(&sites, &site_w, &targets, &domain)) {
        match c {
            PowerCell::Cell(b) => {
                cells.push(b);
                generator.push(Some(keep[*t]));
            }
            PowerCell::Empty => {
                empty.push(EmptyCell { generator: keep[*t], reason: "dominated by other power cells".into() })
            }
        }
    }
    empty.sort_by_key(|e| e.generator);
    Ok(Cells { cells, generator, empty, merged })
}

fn weights_from_radii<P>(p: &PointPattern<P>) -> Result<Vec<f64>> {
    match (&p.marks.radius, &p.marks.weight) {
        (Some(r), _) => {
            if r.iter().any(|x| *x < 0.0) {
                return Err(Error::Parameter("radii must be nonnegative".into()));
            }
            Ok(r.iter().map(|x| x * x).collect())
        }
        (None, Some(w)) => Ok(w.clone()),
        (None, None) => Err(Error::Parameter("Laguerre diagram needs radius or weight marks".into())),
    }
}

/// Planar power diagram with explicit weights (power `|y-x|^2 - w`).
pub fn power_diagram(
    p: &PointPattern<Vec2>,
    weights: &[f64],
    w: &Window<ConvexPolygon>,
    model: &str,
) -> Result<PlanarTessellation> {
    let c = build_cells(&p.points, weights, w)?;
    let mut t = PlanarTessellation::new(model, w.clone(), c.cells, c.generator, Some(p.clone()));
    t.empty_cells = c.empty;
    t.diagnostics.insert("merged_generators".into(), c.merged as f64);
    Ok(t)
}

/// Planar Voronoi tessellation of the pattern inside the window.
pub fn voronoi(p: &PointPattern<Vec2>, w: &Window<ConvexPolygon>) -> Result<PlanarTessellation> {
    power_diagram(p, &vec![0.0; p.len()], w, "voronoi")
}

/// Planar Laguerre tessellation; weights are squared radius marks (or weight marks).
pub fn laguerre(p: &PointPattern<Vec2>, w: &Window<ConvexPolygon>) -> Result<PlanarTessellation> {
    let weights = weights_from_radii(p)?;
    power_diagram(p, &weights, w, "laguerre")
}

/// Spatial power diagram with explicit weights.
pub fn power_diagram3(
    p: &PointPattern<Vec3>,
    weights: &[f64],
    w: &Window<ConvexPolyhedron>,
    model: &str,
) -> Result<SpatialTessellation> {
    let c = build_cells(&p.points, weights, w)?;
    let mut t = SpatialTessellation::new(model, w.clone(), c.cells, c.generator, Some(p.clone()));
    t.empty_cells = c.empty;
    t.diagnostics.insert("merged_generators".into(), c.merged as f64);
    Ok(t)
}

pub fn voronoi3(p: &PointPattern<Vec3>, w: &Window<ConvexPolyhedron>) -> Result<SpatialTessellation> {
    power_diagram3(p, &vec![0.0; p.len()], w, "voronoi")
}

pub fn laguerre3(p: &PointPattern<Vec3>, w: &Window<ConvexPolyhedron>) -> Result<SpatialTessellation> {
    let weights = weights_from_radii(p)?;
    power_diagram3(p, &weights, w, "laguerre")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{vec2, vec3, VertexKind, DEFAULT_TOL_ANGLE};
    use crate::process::{sample_poisson, Seed};
    use approx::assert_relative_eq;

    #[test]
    fn two_points_split_square() {
        let p = PointPattern::new(vec![vec2(0.25, 0.5), vec2(0.75, 0.5)]);
        let t = voronoi(&p, &Window::unit_square()).unwrap();
        assert_eq!(t.len(), 2);
        for c in &t.cells {
            assert_relative_eq!(c.area(), 0.5, epsilon = 1e-12);
            let (lo, hi) = c.bbox();
            assert!((lo.x - 0.5).abs() < 1e-12 || (hi.x - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn single_point_is_window() {
        let p = PointPattern::new(vec![vec2(0.3, 0.6)]);
        let t = voronoi(&p, &Window::unit_square()).unwrap();
        assert_eq!(t.len(), 1);
        assert_relative_eq!(t.cells[0].area(), 1.0, epsilon = 1e-12);
        assert!(voronoi(&PointPattern::new(vec![]), &Window::unit_square()).is_err());
    }

    #[test]
    fn coincident_generators_merge() {
        let p = PointPattern::new(vec![vec2(0.3, 0.6), vec2(0.3, 0.6 + 1e-12), vec2(0.7, 0.2)]);
        let t = voronoi(&p, &Window::unit_square()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.empty_cells.len(), 1);
        assert_eq!(t.empty_cells[0].generator, 1);
    }

    #[test]
    fn laguerre_two_points_power_line() {
        // Radii (r, 0), centres 1 apart: the separating line sits at x = (1 + r^2) / 2.
        let r: f64 = 0.4;
        let mut p = PointPattern::new(vec![vec2(0.0, 0.5), vec2(1.0, 0.5)]);
        p.marks.radius = Some(vec![r, 0.0]);
        let w = Window::new(ConvexPolygon::rect(vec2(-1.0, 0.0), vec2(2.0, 1.0)), EdgeMode::None).unwrap();
        let t = laguerre(&p, &w).unwrap();
        let x = (1.0 + r * r) / 2.0;
        let c0 = &t.cells[0];
        assert_relative_eq!(c0.bbox().1.x, x, epsilon = 1e-12);
        let y = vec2(x, 0.3);
        assert_relative_eq!((y - p.points[0]).norm2() - r * r, (y - p.points[1]).norm2(), epsilon = 1e-12);
    }

    #[test]
    fn balls_inside_own_cells() {
        let pts = vec![vec2(0.2, 0.2), vec2(0.7, 0.3), vec2(0.4, 0.8), vec2(0.8, 0.8)];
        let mut p = PointPattern::new(pts.clone());
        p.marks.radius = Some(vec![0.15, 0.1, 0.12, 0.05]);
        let t = laguerre(&p, &Window::unit_square()).unwrap();
        for (c, g) in t.cells.iter().zip(&t.cell_generator) {
            let g = g.unwrap();
            let r = p.marks.radius.as_ref().unwrap()[g];
            for k in 0..32 {
                let q = pts[g] + crate::geom::Vec2::from_angle(k as f64 * 0.196) * r;
                assert!(c.contains(q, 1e-12));
            }
        }
    }

    #[test]
    fn periodic_voronoi_is_normal_and_euler() {
        let w = Window::new(ConvexPolygon::unit_square(), EdgeMode::Periodic).unwrap();
        for rep in 0..5 {
            let p = sample_poisson(&w, 100.0, &mut Seed::new(17).rng(rep, "pv")).unwrap();
            let t = voronoi(&p, &w).unwrap();
            let l = &t.lattice;
            let (v, e, f) = (l.vertices.len(), l.edges.len(), t.len());
            assert_eq!(v as i64 - e as i64 + f as i64, 0);
            assert_eq!(v, 2 * f);
            assert_eq!(e, 3 * f);
            assert!(t.is_normal());
            assert!((0..v).all(|i| l.classify(i, DEFAULT_TOL_ANGLE) == Some(VertexKind::Y)));
            assert_relative_eq!(t.total_area(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn laguerre_equal_radii_matches_voronoi() {
        let w = Window::unit_square();
        let mut p = sample_poisson(&w, 100.0, &mut Seed::new(3).rng(0, "pv")).unwrap();
        let v = voronoi(&p, &w).unwrap();
        p.marks.radius = Some(vec![0.03; p.len()]);
        let l = laguerre(&p, &w).unwrap();
        assert_eq!(v.cells.len(), l.cells.len());
        for (a, b) in v.cells.iter().zip(&l.cells) {
            assert_eq!(a.len(), b.len());
            for (x, y) in a.vertices().iter().zip(b.vertices()) {
                assert!(x.dist(*y) < 1e-9);
            }
        }
    }

    #[test]
    fn voronoi3_partition() {
        let w = Window::unit_cube();
        let p = sample_poisson(&w, 50.0, &mut Seed::new(4).rng(0, "pv3")).unwrap();
        let t = voronoi3(&p, &w).unwrap();
        assert_relative_eq!(t.total_volume(), 1.0, epsilon = 1e-9);
        let q = PointPattern::new(vec![vec3(0.25, 0.5, 0.5), vec3(0.75, 0.5, 0.5)]);
        let t = voronoi3(&q, &w).unwrap();
        assert_eq!(t.len(), 2);
        assert_relative_eq!(t.cells[0].volume(), 0.5, epsilon = 1e-12);
    }
}
