use super::diagram::voronoi;
use crate::error::Result;
use crate::geom::{ConvexPolygon, Vector, Window};
use crate::process::PointPattern;
use crate::tess::{PlanarTessellation, PointMerger};

/// Final tessellation and the maximal generator displacement of every iteration.
#[derive(Debug, Clone)]
pub struct LloydResult {
    pub tessellation: PlanarTessellation,
    pub displacements: Vec<f64>,
}

/// Lloyd iteration towards a centroidal Voronoi tessellation.
pub fn lloyd_centroidal(p: &PointPattern<crate::geom::Vec2>, w: &Window<ConvexPolygon>, iterations: usize) -> Result<LloydResult> {
    let mut pattern = p.clone();
    let mut displacements = Vec::with_capacity(iterations);
    let wrap = if w.is_periodic() {
        let (lo, hi) = w.bounds();
        Some(PointMerger::new(0.0, Some((lo, hi - lo))))
    } else {
        None
    };
    let mut t = voronoi(&pattern, w)?;
    for _ in 0..iterations {
        let mut max_d: f64 = 0.0;
        for (cell, g) in t.cells.iter().zip(&t.cell_generator) {
            let Some(g) = *g else { continue };
            let mut c = cell.centroid();
            if let Some(m) = &wrap {
                c = m.wrap(c);
                max_d = max_d.max(m.delta(c, pattern.points[g]).norm());
            } else {
                max_d = max_d.max(c.dist(pattern.points[g]));
            }
            pattern.points[g] = c;
        }
        displacements.push(max_d);
        t = voronoi(&pattern, w)?;
    }
    if let Some(d) = displacements.last() {
        t.diagnostics.insert("max_displacement".into(), *d);
    }
    t.diagnostics.insert("iterations".into(), iterations as f64);
    Ok(LloydResult { tessellation: t, displacements })
}
