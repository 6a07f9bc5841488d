//! Poisson line and plane tessellations built by incremental cell splitting.

use rand::Rng;

use crate::error::Result;
use crate::geom::{ConvexBody, ConvexPolygon, ConvexPolyhedron, DirectionRose, Hyperplane, Line, Plane, Side, SphericalRose, Window};
use crate::process::{sample_poisson_lines, sample_poisson_planes};
use crate::tess::{domain_of, PlanarTessellation, SpatialTessellation};

fn split_all<B: ConvexBody>(domain: B, hs: &[Hyperplane<B::Point>]) -> Vec<B> {
    let mut cells = vec![domain];
    for h in hs {
        let mut next = Vec::with_capacity(cells.len() + 8);
        for c in cells {
            if c.crosses(h) {
                match (c.clip_halfspace(h, Side::Below), c.clip_halfspace(h, Side::Above)) {
                    (Some(a), Some(b)) => {
                        next.push(a);
                        next.push(b);
                    }
                    (Some(a), None) | (None, Some(a)) => next.push(a),
                    (None, None) => next.push(c),
                }
            } else {
                next.push(c);
            }
        }
        cells = next;
    }
    cells
}

/// Cells of the line arrangement inside the window.
pub fn arrangement_cells(hs: &[Line], w: &Window<ConvexPolygon>) -> PlanarTessellation {
    let cells = split_all(domain_of(w), hs);
    let mut t = PlanarTessellation::from_cells("line-arrangement", w.clone(), cells);
    t.diagnostics.insert("hyperplanes".into(), hs.len() as f64);
    t
}

/// Cells of the plane arrangement inside the window.
pub fn arrangement_cells3(hs: &[Plane], w: &Window<ConvexPolyhedron>) -> SpatialTessellation {
    let cells = split_all(domain_of(w), hs);
    let mut t = SpatialTessellation::from_cells("plane-arrangement", w.clone(), cells);
    t.diagnostics.insert("hyperplanes".into(), hs.len() as f64);
    t
}

/// Poisson line tessellation with mean line length `lambda` per unit area.
pub fn poisson_line_tessellation<R: Rng + ?Sized>(
    w: &Window<ConvexPolygon>,
    lambda: f64,
    rose: &DirectionRose,
    rng: &mut R,
) -> Result<PlanarTessellation> {
    let lines = sample_poisson_lines(w, lambda, rose, rng)?;
    let mut t = arrangement_cells(&lines, w);
    t.model = "plt".into();
    Ok(t)
}

/// Poisson plane tessellation with mean plane area `lambda` per unit volume.
pub fn poisson_plane_tessellation<R: Rng + ?Sized>(
    w: &Window<ConvexPolyhedron>,
    lambda: f64,
    rose: &SphericalRose,
    rng: &mut R,
) -> Result<SpatialTessellation> {
    let planes = sample_poisson_planes(w, lambda, rose, rng)?;
    let mut t = arrangement_cells3(&planes, w);
    t.model = "php3d".into();
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{vec2, vec3, Vector, VertexKind, DEFAULT_TOL_ANGLE};
    use crate::process::Seed;
    use approx::assert_relative_eq;

    #[test]
    fn empty_and_cross() {
        let w = Window::unit_square();
        assert_eq!(arrangement_cells(&[], &w).len(), 1);
        let hs = [Line::new(vec2(1.0, 0.0), 0.5).unwrap(), Line::new(vec2(0.0, 1.0), 0.5).unwrap()];
        let t = arrangement_cells(&hs, &w);
        assert_eq!(t.len(), 4);
        for c in &t.cells {
            assert_relative_eq!(c.area(), 0.25, epsilon = 1e-12);
        }
        let v: Vec<usize> = t.lattice.interior_vertices().collect();
        assert_eq!(v.len(), 1);
        assert_eq!(t.lattice.classify(v[0], DEFAULT_TOL_ANGLE), Some(VertexKind::X));
    }

    #[test]
    fn general_position_cell_count() {
        // Lines tangent-ish to a small circle: all pairwise intersections lie near the centre.
        let w = Window::unit_square();
        let n = 7;
        let hs: Vec<Line> = (0..n)
            .map(|k| {
                let a = 0.3 + k as f64 * 0.41;
                let u = crate::geom::Vec2::from_angle(a);
                Line::new(u, u.dot(vec2(0.5, 0.5)) + 0.01 * (k as f64 + 1.0)).unwrap()
            })
            .collect();
        let t = arrangement_cells(&hs, &w);
        assert_eq!(t.len(), 1 + n + n * (n - 1) / 2);
        assert_eq!(t.lattice.interior_vertices().count(), n * (n - 1) / 2);
        // Brute-force point location agrees with the cells.
        let mut rng = Seed::new(1).rng(0, "pl");
        use rand::Rng;
        for _ in 0..2000 {
            let p = vec2(rng.random(), rng.random());
            let sig: Vec<bool> = hs.iter().map(|h| h.signed_distance(p) > 0.0).collect();
            let owners: Vec<usize> = (0..t.len()).filter(|&i| t.cells[i].contains(p, 0.0)).collect();
            assert_eq!(owners.len(), 1);
            let c = t.cells[owners[0]].centroid();
            let csig: Vec<bool> = hs.iter().map(|h| h.signed_distance(c) > 0.0).collect();
            assert_eq!(sig, csig);
        }
    }

    #[test]
    fn rectangular_rose_gives_rectangles() {
        let w = Window::unit_square();
        let rose = DirectionRose::axis_aligned(0.5).unwrap();
        let t = poisson_line_tessellation(&w, 10.0, &rose, &mut Seed::new(2).rng(0, "plt")).unwrap();
        assert!(t.cells.iter().all(|c| c.len() == 4 && c.is_axis_box()));
    }

    #[test]
    fn plane_tessellation_partition() {
        let w = Window::unit_cube();
        let t = poisson_plane_tessellation(&w, 6.0, &SphericalRose::Isotropic, &mut Seed::new(3).rng(0, "php")).unwrap();
        assert_relative_eq!(t.total_volume(), 1.0, epsilon = 1e-9);
        let p = [Plane::new(vec3(1.0, 1.0, 1.0), 1.5).unwrap()];
        let t = arrangement_cells3(&p, &w);
        assert_eq!(t.len(), 2);
        assert_relative_eq!(t.cells[0].volume(), 0.5, epsilon = 1e-12);
    }
}
