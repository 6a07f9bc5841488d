use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::oracle::{oracle_poisson_delaunay, oracle_poisson_line, oracle_poisson_voronoi, Oracle};
use super::report::Report;
use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, Vec2};

/// Largest area of a triangle inscribed in the unit circle.
const MAX_INSCRIBED: f64 = 3.0 * 1.732_050_807_568_877_2 / 4.0;

/// Direct draw of the typical cell of the planar Poisson-Delaunay tessellation.
///
/// Three directions with joint density proportional to the area of the
/// inscribed triangle they span, scaled by `r` where `r^2 ~ Gamma(2, lambda*pi)`.
pub fn sample_pdt_typical_cell<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<ConvexPolygon> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("intensity must be positive, got {lambda}")));
    }
    let us = loop {
        let u: [Vec2; 3] = std::array::from_fn(|_| {
            let t = rng.random::<f64>() * 2.0 * PI;
            Vec2 { x: t.cos(), y: t.sin() }
        });
        let area = 0.5 * (u[1] - u[0]).cross(u[2] - u[0]).abs();
        if rng.random::<f64>() * MAX_INSCRIBED < area {
            break u;
        }
    };
    let r2 = Gamma::new(2.0, 1.0 / (lambda * PI)).map_err(|e| Error::Numeric(e.to_string()))?.sample(rng);
    let r = r2.sqrt();
    ConvexPolygon::hull(&us.map(|u| u * r)).ok_or_else(|| Error::Numeric("degenerate typical triangle".into()))
}

/// Model families whose intensity can be recovered from estimated mean values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Pv2,
    Pv3,
    Plt,
    Pdt,
}

impl Family {
    pub fn oracle(self, lambda: f64) -> Result<Oracle> {
        match self {
            Family::Pv2 => oracle_poisson_voronoi(lambda, 2),
            Family::Pv3 => oracle_poisson_voronoi(lambda, 3),
            Family::Plt => oracle_poisson_line(lambda),
            Family::Pdt => oracle_poisson_delaunay(lambda),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pv2" => Ok(Family::Pv2),
            "pv3" => Ok(Family::Pv3),
            "plt" => Ok(Family::Plt),
            "pdt" => Ok(Family::Pdt),
            _ => Err(Error::Parameter(format!("unknown model family {s:?}, expected pv2|pv3|plt|pdt"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    pub estimate: f64,
    /// Inversion of each mean value that scales with the intensity.
    pub per_formula: BTreeMap<String, f64>,
    /// `(max - min) / estimate` over the per-formula values.
    pub spread: f64,
}

/// Intensity recovered by inverting the mean-value formulas of a model family.
///
/// Every oracle value scales as `lambda^e`; each estimated value with `e != 0`
/// yields `lambda = (x / v1)^(1/e)`. The combined value is the least-squares
/// fit on the log scale, weighted by `e^2`.
pub fn estimate_lambda(report: &Report, family: Family) -> Result<LambdaEstimate> {
    let one = family.oracle(1.0)?;
    let two = family.oracle(2.0)?;
    let mut per_formula = BTreeMap::new();
    let (mut num, mut den) = (0.0, 0.0);
    for (name, &v1) in &one.values {
        let Some(x) = report.get(name) else { continue };
        let e = (two.values[name] / v1).log2();
        if e.abs() < 1e-9 || !(x > 0.0) || !x.is_finite() {
            continue;
        }
        let l = (x / v1).powf(1.0 / e);
        per_formula.insert(name.clone(), l);
        num += e * e * l.ln();
        den += e * e;
    }
    if per_formula.is_empty() {
        return Err(Error::InsufficientSample("no intensity-dependent mean values in the report".into()));
    }
    let estimate = (num / den).exp();
    let (lo, hi) = per_formula.values().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    Ok(LambdaEstimate { estimate, per_formula, spread: (hi - lo) / estimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vector;
    use crate::process::Seed;
    use approx::assert_relative_eq;

    #[test]
    fn pdt_sampler_moments() {
        let mut rng = Seed::new(11).rng(0, "pdt");
        let lambda = 100.0;
        let n = 20_000;
        let (mut r2, mut area) = (0.0, 0.0);
        for _ in 0..n {
            let c = sample_pdt_typical_cell(lambda, &mut rng).unwrap();
            assert_eq!(c.len(), 3);
            // circumradius squared from a vertex: the triangle is inscribed in a circle about the origin
            r2 += c.vertices()[0].norm2();
            area += c.area();
        }
        let (r2, area) = (r2 / n as f64, area / n as f64);
        assert!((r2 * lambda * PI / 2.0 - 1.0).abs() < 0.03, "{r2}");
        assert!((area * 2.0 * lambda - 1.0).abs() < 0.03, "{area}");
        assert!(sample_pdt_typical_cell(0.0, &mut rng).is_err());
    }

    #[test]
    fn inversion_of_oracle_values_is_exact() {
        for fam in [Family::Pv2, Family::Pv3, Family::Plt, Family::Pdt] {
            for lambda in [0.5, 7.0, 100.0] {
                let o = fam.oracle(lambda).unwrap();
                let r = Report { dim: o.dim, replicates: 1, values: o.values.clone(), ..Default::default() };
                let est = estimate_lambda(&r, fam).unwrap();
                assert_relative_eq!(est.estimate, lambda, max_relative = 1e-9);
                assert!(est.spread < 1e-9);
            }
        }
        assert!(estimate_lambda(&Report::single(2), Family::Pv2).is_err());
        assert!("pv4".parse::<Family>().is_err());
    }

    #[test]
    fn line_intensity_from_length_density() {
        let mut r = Report::single(2);
        r.set("mu1", 3.7);
        let est = estimate_lambda(&r, Family::Plt).unwrap();
        assert_relative_eq!(est.estimate, 3.7, max_relative = 1e-12);
    }
}
