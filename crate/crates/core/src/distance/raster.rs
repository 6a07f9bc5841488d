use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, Vec2, Vector, Window};
use crate::process::PointPattern;
use crate::tess::{PlanarTessellation, RasterTessellation};

/// Minimum accepted raster resolution.
pub const MIN_RESOLUTION: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Max,
}

/// Generator-to-point discrepancy used by the raster engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RasterModel {
    /// Voronoi in an `l_p` metric.
    Metric { norm: Norm },
    /// `|y-x| - r` with radius marks.
    JohnsonMehl,
    /// `w |y-x|` with weight marks.
    Multiplicative,
    /// `|y-x|^2 - r^2` with radius marks.
    Laguerre,
    /// `(y-x)^T M (y-x) - w` with matrix and weight marks.
    Gbpd,
}

/// Ellipsoidal generator of a generalised balanced power diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbpdGenerator {
    pub center: Vec2,
    /// Symmetric positive-definite matrix, row-major.
    pub matrix: [[f64; 2]; 2],
    pub weight: f64,
}

impl GbpdGenerator {
    pub fn new(center: Vec2, matrix: [[f64; 2]; 2], weight: f64) -> Result<Self> {
        let g = Self { center, matrix, weight };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.matrix;
        if (m[0][1] - m[1][0]).abs() > 1e-12 * (m[0][1].abs() + 1.0) {
            return Err(Error::Parameter("GBPD matrix must be symmetric".into()));
        }
        let (l1, l2) = self.eigenvalues();
        if !(l1 > 0.0 && l2 > 0.0) {
            return Err(Error::Parameter("GBPD matrix must be positive definite".into()));
        }
        Ok(())
    }

    /// Eigenvalues in decreasing order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let m = self.matrix;
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        (0.5 * tr + disc, 0.5 * tr - disc)
    }

    /// `M = U diag(1/a^2) U^T`: returns the rotation `U` (columns are the ellipse axes)
    /// and the semi-axis lengths `a`.
    pub fn decompose(&self) -> ([[f64; 2]; 2], [f64; 2]) {
        let m = self.matrix;
        let theta = 0.5 * (2.0 * m[0][1]).atan2(m[0][0] - m[1][1]);
        let (c, s) = (theta.cos(), theta.sin());
        let u = [[c, -s], [s, c]];
        let q = |x: f64, y: f64| x * (m[0][0] * x + m[0][1] * y) + y * (m[1][0] * x + m[1][1] * y);
        let l = [q(c, s), q(-s, c)];
        (u, [1.0 / l[0].sqrt(), 1.0 / l[1].sqrt()])
    }

    pub fn distance(&self, y: Vec2) -> f64 {
        let d = y - self.center;
        let m = self.matrix;
        d.x * (m[0][0] * d.x + m[0][1] * d.y) + d.y * (m[1][0] * d.x + m[1][1] * d.y) - self.weight
    }
}

fn need<'a>(v: &'a Option<Vec<f64>>, what: &str, n: usize) -> Result<&'a [f64]> {
    match v {
        Some(x) if x.len() == n => Ok(x),
        _ => Err(Error::Parameter(format!("model needs {what} marks for every generator"))),
    }
}

/// Labels each pixel centre with the generator of minimal discrepancy (lowest index on ties).
pub fn raster_assign(
    p: &PointPattern<Vec2>,
    model: RasterModel,
    resolution: usize,
    w: &Window<ConvexPolygon>,
) -> Result<RasterTessellation> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Parameter(format!("resolution must be at least {MIN_RESOLUTION}")));
    }
    if p.is_empty() {
        return Err(Error::Parameter("raster engine needs at least one generator".into()));
    }
    let n = p.len();
    let pts = &p.points;
    let (lo, hi) = w.bounds();
    let dist: Box<dyn Fn(usize, Vec2) -> f64 + Sync> = match model {
        RasterModel::Metric { norm } => Box::new(move |i, y| {
            let d = y - pts[i];
            match norm {
                Norm::L1 => d.x.abs() + d.y.abs(),
                Norm::L2 => d.norm2(),
                Norm::Max => d.x.abs().max(d.y.abs()),
            }
        }),
        RasterModel::JohnsonMehl => {
            let r = need(&p.marks.radius, "radius", n)?;
            Box::new(move |i, y| y.dist(pts[i]) - r[i])
        }
        RasterModel::Multiplicative => {
            let wt = need(&p.marks.weight, "weight", n)?;
            if wt.iter().any(|x| !(*x > 0.0)) {
                return Err(Error::Parameter("multiplicative weights must be positive".into()));
            }
            Box::new(move |i, y| wt[i] * y.dist(pts[i]))
        }
        RasterModel::Laguerre => {
            let r = need(&p.marks.radius, "radius", n)?;
            Box::new(move |i, y| (y - pts[i]).norm2() - r[i] * r[i])
        }
        RasterModel::Gbpd => {
            let wt = need(&p.marks.weight, "weight", n)?;
            let ms = match &p.marks.matrix {
                Some(m) if m.len() == n => m,
                _ => return Err(Error::Parameter("GBPD needs matrix marks for every generator".into())),
            };
            let gens: Vec<GbpdGenerator> = (0..n)
                .map(|i| {
                    let m = &ms[i];
                    if m.len() != 4 {
                        return Err(Error::Parameter("GBPD matrices must be 2x2 row-major".into()));
                    }
                    GbpdGenerator::new(pts[i], [[m[0], m[1]], [m[2], m[3]]], wt[i])
                })
                .collect::<Result<_>>()?;
            Box::new(move |i, y| gens[i].distance(y))
        }
    };
    let hx = (hi.x - lo.x) / resolution as f64;
    let hy = (hi.y - lo.y) / resolution as f64;
    let labels: Vec<u32> = (0..resolution)
        .into_par_iter()
        .flat_map_iter(|j| {
            let dist = &dist;
            (0..resolution).map(move |i| {
                let y = Vec2 { x: lo.x + (i as f64 + 0.5) * hx, y: lo.y + (j as f64 + 0.5) * hy };
                let mut best = 0usize;
                let mut bd = dist(0, y);
                for k in 1..n {
                    let d = dist(k, y);
                    if d < bd {
                        bd = d;
                        best = k;
                    }
                }
                best as u32
            })
        })
        .collect();
    let tag = match model {
        RasterModel::Metric { .. } => "voronoi-metric",
        RasterModel::JohnsonMehl => "johnson-mehl",
        RasterModel::Multiplicative => "multiplicative",
        RasterModel::Laguerre => "laguerre",
        RasterModel::Gbpd => "gbpd",
    };
    Ok(RasterTessellation {
        model: tag.into(),
        lo,
        hi,
        resolution,
        labels,
        n_labels: n,
        generators: Some(p.clone()),
    })
}

/// Rasterises an exact tessellation: each pixel centre gets the generator index of
/// the first cell containing it (cell index when cells have no generator).
pub fn rasterize(t: &PlanarTessellation, resolution: usize) -> RasterTessellation {
    let (lo, hi) = t.window.bounds();
    let hx = (hi.x - lo.x) / resolution as f64;
    let hy = (hi.y - lo.y) / resolution as f64;
    let mut labels = vec![u32::MAX; resolution * resolution];
    for (ci, c) in t.cells.iter().enumerate() {
        let label = t.cell_generator[ci].unwrap_or(ci) as u32;
        let (clo, chi) = c.bbox();
        let i0 = (((clo.x - lo.x) / hx - 0.5).floor().max(0.0)) as usize;
        let i1 = (((chi.x - lo.x) / hx - 0.5).ceil().max(0.0) as usize).min(resolution.saturating_sub(1));
        let j0 = (((clo.y - lo.y) / hy - 0.5).floor().max(0.0)) as usize;
        let j1 = (((chi.y - lo.y) / hy - 0.5).ceil().max(0.0) as usize).min(resolution.saturating_sub(1));
        for j in j0..=j1 {
            for i in i0..=i1 {
                let k = j * resolution + i;
                if labels[k] != u32::MAX {
                    continue;
                }
                let y = Vec2 { x: lo.x + (i as f64 + 0.5) * hx, y: lo.y + (j as f64 + 0.5) * hy };
                if c.contains(y, 0.0) {
                    labels[k] = label;
                }
            }
        }
    }
    let n_labels = t.generators.as_ref().map_or(t.cells.len(), |g| g.len()).max(t.cells.len());
    for l in labels.iter_mut() {
        if *l == u32::MAX {
            *l = 0;
        }
    }
    RasterTessellation {
        model: t.model.clone(),
        lo,
        hi,
        resolution,
        labels,
        n_labels,
        generators: t.generators.clone(),
    }
}

/// Fraction of pixels with equal labels.
pub fn label_agreement(a: &RasterTessellation, b: &RasterTessellation) -> f64 {
    let same = a.labels.iter().zip(&b.labels).filter(|(x, y)| x == y).count();
    same as f64 / a.labels.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{laguerre, voronoi};
    use crate::geom::vec2;
    use crate::process::{sample_poisson, Seed};

    #[test]
    fn jm_with_zero_radii_is_voronoi() {
        let w = Window::unit_square();
        let mut p = sample_poisson(&w, 50.0, &mut Seed::new(1).rng(0, "r")).unwrap();
        let v = raster_assign(&p, RasterModel::Metric { norm: Norm::L2 }, 128, &w).unwrap();
        p.marks.radius = Some(vec![0.0; p.len()]);
        let jm = raster_assign(&p, RasterModel::JohnsonMehl, 128, &w).unwrap();
        assert_eq!(v.labels, jm.labels);
    }

    #[test]
    fn metrics_differ_and_l2_matches_exact() {
        let w = Window::unit_square();
        let p = sample_poisson(&w, 100.0, &mut Seed::new(2).rng(0, "r")).unwrap();
        let f = |norm| raster_assign(&p, RasterModel::Metric { norm }, 256, &w).unwrap();
        let (a, b, c) = (f(Norm::L1), f(Norm::L2), f(Norm::Max));
        assert_ne!(a.labels, b.labels);
        assert_ne!(b.labels, c.labels);
        assert_ne!(a.labels, c.labels);
        let exact = rasterize(&voronoi(&p, &w).unwrap(), 256);
        assert!(label_agreement(&exact, &b) > 0.999);
    }

    #[test]
    fn gbpd_identity_is_laguerre() {
        let w = Window::unit_square();
        let mut p = sample_poisson(&w, 60.0, &mut Seed::new(3).rng(0, "r")).unwrap();
        let r: Vec<f64> = (0..p.len()).map(|i| 0.02 + 0.001 * (i % 30) as f64).collect();
        p.marks.weight = Some(r.iter().map(|x| x * x).collect());
        p.marks.matrix = Some(vec![vec![1.0, 0.0, 0.0, 1.0]; p.len()]);
        p.marks.radius = Some(r);
        let g = raster_assign(&p, RasterModel::Gbpd, 256, &w).unwrap();
        let exact = rasterize(&laguerre(&p, &w).unwrap(), 256);
        assert!(label_agreement(&exact, &g) > 0.999);
    }

    #[test]
    fn gbpd_decomposition_roundtrip() {
        let g = GbpdGenerator::new(vec2(0.0, 0.0), [[2.0, 0.5], [0.5, 1.0]], 0.0).unwrap();
        let (u, a) = g.decompose();
        for r in 0..2 {
            for c in 0..2 {
                let m: f64 = (0..2).map(|k| u[r][k] * u[c][k] / (a[k] * a[k])).sum();
                assert!((m - g.matrix[r][c]).abs() < 1e-12);
            }
        }
        assert!(GbpdGenerator::new(vec2(0.0, 0.0), [[1.0, 2.0], [2.0, 1.0]], 0.0).is_err());
    }
}
