use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, Vec2, Vector, Window};
use crate::process::{MarkDistribution, PointPattern, Seed};
use crate::tess::RasterTessellation;

/// Minimum resolution of a dead-leaves raster.
pub const MIN_LEAF_RESOLUTION: usize = 64;
const MAX_LEAVES: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LeafShape {
    Disc { radius: MarkDistribution },
    /// Equilateral triangle with random side length.
    Triangle { size: MarkDistribution },
    /// Template polygon around the origin, scaled by a random factor.
    Polygon { vertices: Vec<Vec2>, scale: MarkDistribution },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafModel {
    pub shape: LeafShape,
    /// Arrival rate; only fixes the time scale, not the pattern.
    #[serde(default = "one")]
    pub intensity: f64,
}

fn one() -> f64 {
    1.0
}

impl LeafModel {
    pub fn disc(radius: MarkDistribution) -> Self {
        Self { shape: LeafShape::Disc { radius }, intensity: 1.0 }
    }

    fn template(&self) -> Option<ConvexPolygon> {
        match &self.shape {
            LeafShape::Disc { .. } => None,
            LeafShape::Triangle { .. } => {
                let r = 1.0 / 3f64.sqrt();
                Some(ConvexPolygon::from_ccw_unchecked((0..3).map(|k| Vec2::from_angle(PI / 2.0 + k as f64 * 2.0 * PI / 3.0) * r).collect()))
            }
            LeafShape::Polygon { vertices, .. } => ConvexPolygon::hull(vertices),
        }
    }

    fn size_dist(&self) -> &MarkDistribution {
        match &self.shape {
            LeafShape::Disc { radius } => radius,
            LeafShape::Triangle { size } => size,
            LeafShape::Polygon { scale, .. } => scale,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.intensity > 0.0 && self.intensity.is_finite()) {
            return Err(Error::Parameter("leaf intensity must be positive".into()));
        }
        let d = self.size_dist();
        d.validate()?;
        if !(d.mean() > 0.0) {
            return Err(Error::Parameter("leaves must have positive size".into()));
        }
        if !matches!(self.shape, LeafShape::Disc { .. }) && self.template().is_none_or(|t| !(t.area() > 0.0)) {
            return Err(Error::Parameter("leaf template has zero area".into()));
        }
        Ok(())
    }
}

/// One placed leaf.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    /// Position in the drawing order (0 = on top).
    pub draw: usize,
    pub center: Vec2,
    pub angle: f64,
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeadLeaves {
    /// Labels index into `leaves`.
    pub raster: RasterTessellation,
    /// Leaves with at least one visible pixel.
    pub leaves: Vec<Leaf>,
    /// Leaves drawn until the window was covered.
    pub drawn: usize,
}

/// Dead-leaves tessellation by a reverse-time sweep: leaves are drawn from
/// the top down and each claims the pixels not yet covered.
pub fn dead_leaves(w: &Window<ConvexPolygon>, leaves: &LeafModel, resolution: usize, seed: Seed) -> Result<DeadLeaves> {
    leaves.validate()?;
    if resolution < MIN_LEAF_RESOLUTION {
        return Err(Error::Parameter(format!("resolution must be at least {MIN_LEAF_RESOLUTION}")));
    }
    let (lo, hi) = w.bounds();
    let n = resolution;
    let (hx, hy) = ((hi.x - lo.x) / n as f64, (hi.y - lo.y) / n as f64);
    let template = leaves.template();
    let reach = template.as_ref().map_or(1.0, |t| t.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max));
    let dist = leaves.size_dist();
    let margin = reach * dist.upper_quantile();
    let (dlo, dhi) = (lo - Vec2 { x: margin, y: margin }, hi + Vec2 { x: margin, y: margin });

    let mut labels = vec![u32::MAX; n * n];
    let mut left = n * n;
    let mut visible = Vec::new();
    let mut rng = seed.rng(0, "leaves");
    let mut drawn = 0;
    while left > 0 {
        if drawn >= MAX_LEAVES {
            return Err(Error::Resource(format!("window not covered after {MAX_LEAVES} leaves")));
        }
        let size = dist.sample(&mut rng).max(0.0);
        let center = Vec2 { x: rng.random_range(dlo.x..dhi.x), y: rng.random_range(dlo.y..dhi.y) };
        let angle = rng.random::<f64>() * 2.0 * PI;
        let leaf = Leaf { draw: drawn, center, angle, size };
        drawn += 1;
        if size <= 0.0 {
            continue;
        }
        let r = reach * size;
        let i0 = (((center.x - r - lo.x) / hx).floor().max(0.0)) as usize;
        let j0 = (((center.y - r - lo.y) / hy).floor().max(0.0)) as usize;
        let i1 = (((center.x + r - lo.x) / hx).ceil().max(0.0) as usize).min(n);
        let j1 = (((center.y + r - lo.y) / hy).ceil().max(0.0) as usize).min(n);
        let (c, s) = (angle.cos(), angle.sin());
        let label = visible.len() as u32;
        let mut claimed = false;
        for j in j0..j1 {
            for i in i0..i1 {
                let k = j * n + i;
                if labels[k] != u32::MAX {
                    continue;
                }
                let p = Vec2 { x: lo.x + (i as f64 + 0.5) * hx, y: lo.y + (j as f64 + 0.5) * hy } - center;
                // pixel centre in the leaf frame
                let q = Vec2 { x: c * p.x + s * p.y, y: -s * p.x + c * p.y } / size;
                let inside = match &template {
                    None => q.norm2() <= 1.0,
                    Some(t) => t.contains(q, 0.0),
                };
                if inside {
                    labels[k] = label;
                    left -= 1;
                    claimed = true;
                }
            }
        }
        if claimed {
            visible.push(leaf);
        }
    }
    let raster = RasterTessellation {
        model: "dead-leaves".into(),
        lo,
        hi,
        resolution: n,
        labels,
        n_labels: visible.len(),
        generators: Some(PointPattern::new(visible.iter().map(|l| l.center).collect())),
    };
    Ok(DeadLeaves { raster, leaves: visible, drawn })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn discs() -> LeafModel {
        LeafModel::disc(MarkDistribution::Constant { value: 0.1 })
    }

    #[test]
    fn covers_every_pixel() {
        let d = dead_leaves(&Window::unit_square(), &discs(), 128, Seed::new(1)).unwrap();
        assert!(d.raster.labels.iter().all(|&l| (l as usize) < d.leaves.len()));
        assert!(d.drawn >= d.leaves.len());
    }

    #[test]
    fn every_pixel_inside_its_leaf() {
        let d = dead_leaves(&Window::unit_square(), &discs(), 96, Seed::new(2)).unwrap();
        for j in 0..96 {
            for i in 0..96 {
                let leaf = d.leaves[d.raster.label(i, j) as usize];
                assert!(d.raster.pixel_center(i, j).dist(leaf.center) <= 0.1 + 1e-12);
            }
        }
    }

    #[test]
    fn visible_leaf_count_regression() {
        let d = dead_leaves(&Window::unit_square(), &discs(), 256, Seed::new(2024)).unwrap();
        assert_eq!(d.leaves.len(), REGRESSION_VISIBLE);
    }
    // Simulation regression for this seed; there is no closed form.
    const REGRESSION_VISIBLE: usize = 134;

    #[test]
    fn triangles_and_templates() {
        let tri = LeafModel { shape: LeafShape::Triangle { size: MarkDistribution::Uniform { a: 0.1, b: 0.3 } }, intensity: 1.0 };
        let d = dead_leaves(&Window::unit_square(), &tri, 64, Seed::new(3)).unwrap();
        assert!(!d.leaves.is_empty());
        let flat = LeafModel {
            shape: LeafShape::Polygon { vertices: vec![Vec2 { x: 0.0, y: 0.0 }, Vec2 { x: 1.0, y: 0.0 }], scale: MarkDistribution::Constant { value: 1.0 } },
            intensity: 1.0,
        };
        assert!(dead_leaves(&Window::unit_square(), &flat, 64, Seed::new(3)).is_err());
        assert!(dead_leaves(&Window::unit_square(), &LeafModel::disc(MarkDistribution::Constant { value: 0.0 }), 64, Seed::new(3)).is_err());
        assert!(dead_leaves(&Window::unit_square(), &discs(), 32, Seed::new(3)).is_err());
    }
}
