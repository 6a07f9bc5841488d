use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::polygon::ConvexPolygon;
use super::polyhedron::ConvexPolyhedron;
use super::vector::{vec3, Vec2, Vec3, Vector};
use crate::error::{Error, Result};

const PROB_TOL: f64 = 1e-12;

/// Distribution of line normal directions, stored as angles in `[0, pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DirectionRose {
    #[default]
    Isotropic,
    Discrete { angles: Vec<f64>, probs: Vec<f64> },
    /// Piecewise-constant density on a uniform grid over `[0, pi)`.
    Density { weights: Vec<f64> },
}

fn fold_angle(a: f64) -> f64 {
    let r = a.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

fn check_probs(probs: &[f64]) -> Result<()> {
    if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(Error::Parameter("probabilities must be finite and nonnegative".into()));
    }
    let s: f64 = probs.iter().sum();
    if (s - 1.0).abs() > PROB_TOL {
        return Err(Error::Parameter(format!("probabilities sum to {s}, expected 1")));
    }
    Ok(())
}

impl DirectionRose {
    pub fn isotropic() -> Self {
        DirectionRose::Isotropic
    }

    /// Discrete rose from unit normal directions and their probabilities.
    pub fn discrete(directions: &[Vec2], probs: &[f64]) -> Result<Self> {
        if directions.len() != probs.len() || directions.is_empty() {
            return Err(Error::Parameter("directions and probabilities must be nonempty and equally long".into()));
        }
        for d in directions {
            if (d.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::Parameter(format!("direction {d:?} is not a unit vector")));
            }
        }
        check_probs(probs)?;
        let rose = DirectionRose::Discrete {
            angles: directions.iter().map(|d| fold_angle(d.angle())).collect(),
            probs: probs.to_vec(),
        };
        rose.validate()?;
        Ok(rose)
    }

    /// Normals along both coordinate axes with probabilities `p` and `1-p`.
    pub fn axis_aligned(p: f64) -> Result<Self> {
        Self::discrete(&[Vec2 { x: 1.0, y: 0.0 }, Vec2 { x: 0.0, y: 1.0 }], &[p, 1.0 - p])
    }

    pub fn density(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::Parameter("density weights must be nonempty, finite and nonnegative".into()));
        }
        let s: f64 = weights.iter().sum();
        if s <= 0.0 {
            return Err(Error::DegenerateRose("density has zero mass".into()));
        }
        let rose = DirectionRose::Density { weights: weights.iter().map(|w| w / s).collect() };
        rose.validate()?;
        Ok(rose)
    }

    /// Checks that the rose is not concentrated on a single direction.
    pub fn validate(&self) -> Result<()> {
        match self {
            DirectionRose::Isotropic => Ok(()),
            DirectionRose::Discrete { angles, probs } => {
                if angles.len() != probs.len() {
                    return Err(Error::Parameter("angles and probabilities differ in length".into()));
                }
                check_probs(probs)?;
                let support: Vec<f64> =
                    angles.iter().zip(probs).filter(|(_, p)| **p > 0.0).map(|(a, _)| fold_angle(*a)).collect();
                let distinct = support.iter().any(|a| {
                    let d = (a - support[0]).abs();
                    d.min(PI - d) > 1e-9
                });
                if distinct {
                    Ok(())
                } else {
                    Err(Error::DegenerateRose("all mass on a single direction".into()))
                }
            }
            DirectionRose::Density { weights } => {
                // A single bin spans every direction.
                if weights.len() == 1 || weights.iter().filter(|w| **w > 0.0).count() >= 2 {
                    Ok(())
                } else {
                    Err(Error::DegenerateRose("density supported on a single bin".into()))
                }
            }
        }
    }

    /// Draws a normal angle in `[0, pi)`.
    pub fn sample_angle<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            DirectionRose::Isotropic => rng.random::<f64>() * PI,
            DirectionRose::Discrete { angles, probs } => angles[pick(probs, rng.random::<f64>())],
            DirectionRose::Density { weights } => {
                let i = pick(weights, rng.random::<f64>());
                let h = PI / weights.len() as f64;
                (i as f64 + rng.random::<f64>()) * h
            }
        }
    }

    pub fn sample_normal<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec2 {
        Vec2::from_angle(self.sample_angle(rng))
    }

    /// `Λ([C])` for unit intensity: the rose-averaged width of `c`.
    pub fn hit_measure(&self, c: &ConvexPolygon) -> f64 {
        match self {
            DirectionRose::Isotropic => c.perimeter() / PI,
            DirectionRose::Discrete { angles, probs } => {
                angles.iter().zip(probs).map(|(a, p)| p * c.width(Vec2::from_angle(*a))).sum()
            }
            DirectionRose::Density { weights } => {
                // Width is piecewise smooth in the angle; average over sub-grid points per bin.
                let h = PI / weights.len() as f64;
                const SUB: usize = 8;
                weights
                    .iter()
                    .enumerate()
                    .map(|(i, w)| {
                        if *w == 0.0 {
                            return 0.0;
                        }
                        let m: f64 = (0..SUB)
                            .map(|j| c.width(Vec2::from_angle((i as f64 + (j as f64 + 0.5) / SUB as f64) * h)))
                            .sum::<f64>()
                            / SUB as f64;
                        w * m
                    })
                    .sum()
            }
        }
    }

    pub fn is_isotropic(&self) -> bool {
        matches!(self, DirectionRose::Isotropic)
    }
}

fn pick(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(0)
}

/// Distribution of plane normal directions on the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SphericalRose {
    #[default]
    Isotropic,
    Discrete { directions: Vec<Vec3>, probs: Vec<f64> },
}

impl SphericalRose {
    pub fn discrete(directions: Vec<Vec3>, probs: Vec<f64>) -> Result<Self> {
        if directions.len() != probs.len() || directions.is_empty() {
            return Err(Error::Parameter("directions and probabilities must be nonempty and equally long".into()));
        }
        let rose = SphericalRose::Discrete { directions, probs };
        rose.validate()?;
        Ok(rose)
    }

    /// Normals along the three coordinate axes with equal probability.
    pub fn axes() -> Self {
        SphericalRose::Discrete {
            directions: vec![vec3(1.0, 0.0, 0.0), vec3(0.0, 1.0, 0.0), vec3(0.0, 0.0, 1.0)],
            probs: vec![1.0 / 3.0; 3],
        }
    }

    /// Rejects roses concentrated on a great circle (no bounded cells).
    pub fn validate(&self) -> Result<()> {
        match self {
            SphericalRose::Isotropic => Ok(()),
            SphericalRose::Discrete { directions, probs } => {
                if probs.iter().any(|p| !(*p >= 0.0)) || ((probs.iter().sum::<f64>() - 1.0).abs() > 1e-9) {
                    return Err(Error::Parameter("probabilities must be nonnegative and sum to 1".into()));
                }
                if directions.iter().any(|d| (d.norm() - 1.0).abs() > 1e-12) {
                    return Err(Error::Parameter("directions must be unit vectors".into()));
                }
                let s: Vec<Vec3> = directions.iter().zip(probs).filter(|(_, p)| **p > 0.0).map(|(d, _)| *d).collect();
                for i in 0..s.len() {
                    for j in i + 1..s.len() {
                        for k in j + 1..s.len() {
                            if s[i].dot(s[j].cross(s[k])).abs() > 1e-9 {
                                return Ok(());
                            }
                        }
                    }
                }
                Err(Error::DegenerateRose("normals lie on a great circle".into()))
            }
        }
    }

    pub fn sample_normal<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec3 {
        match self {
            SphericalRose::Isotropic => {
                let z = 2.0 * rng.random::<f64>() - 1.0;
                let phi = 2.0 * PI * rng.random::<f64>();
                let s = (1.0 - z * z).max(0.0).sqrt();
                vec3(s * phi.cos(), s * phi.sin(), z)
            }
            SphericalRose::Discrete { directions, probs } => directions[pick(probs, rng.random::<f64>())],
        }
    }

    /// `Λ([K])` for unit intensity: the rose-averaged width of `k`.
    pub fn hit_measure(&self, k: &ConvexPolyhedron) -> f64 {
        match self {
            SphericalRose::Isotropic => k.mean_width(),
            SphericalRose::Discrete { directions, probs } => {
                directions.iter().zip(probs).map(|(d, p)| p * k.width(*d)).sum()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::vector::vec2;
    use approx::assert_relative_eq;

    #[test]
    fn degenerate_discrete_rejected() {
        let r = DirectionRose::discrete(&[vec2(1.0, 0.0), vec2(0.0, 1.0)], &[1.0, 0.0]);
        assert!(matches!(r, Err(Error::DegenerateRose(_))));
        assert!(DirectionRose::discrete(&[vec2(1.0, 0.0)], &[0.9]).is_err());
        assert!(SphericalRose::discrete(
            vec![vec3(1.0, 0.0, 0.0), vec3(0.0, 1.0, 0.0)],
            vec![0.5, 0.5]
        )
        .is_err());
    }

    #[test]
    fn hit_measures() {
        let sq = ConvexPolygon::unit_square();
        assert_relative_eq!(DirectionRose::Isotropic.hit_measure(&sq), 4.0 / PI);
        assert_relative_eq!(DirectionRose::axis_aligned(0.5).unwrap().hit_measure(&sq), 1.0, epsilon = 1e-12);
        let flat = DirectionRose::density(vec![1.0; 64]).unwrap();
        assert_relative_eq!(flat.hit_measure(&sq), 4.0 / PI, epsilon = 1e-4);
        assert_relative_eq!(SphericalRose::Isotropic.hit_measure(&ConvexPolyhedron::unit_cube()), 1.5, epsilon = 1e-12);
    }
}
