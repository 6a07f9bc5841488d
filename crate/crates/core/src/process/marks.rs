use rand::Rng;
use rand_distr::{Distribution, Gamma, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of a scalar mark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MarkDistribution {
    Constant { value: f64 },
    Uniform { a: f64, b: f64 },
    Lognormal { mu: f64, sigma: f64 },
    Gamma { shape: f64, scale: f64 },
}

impl MarkDistribution {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            MarkDistribution::Constant { value } => value.is_finite(),
            MarkDistribution::Uniform { a, b } => a.is_finite() && b.is_finite() && a <= b,
            MarkDistribution::Lognormal { mu, sigma } => mu.is_finite() && sigma > 0.0 && sigma.is_finite(),
            MarkDistribution::Gamma { shape, scale } => shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("invalid mark distribution {self:?}")))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            MarkDistribution::Constant { value } => value,
            MarkDistribution::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            MarkDistribution::Lognormal { mu, sigma } => LogNormal::new(mu, sigma).unwrap().sample(rng),
            MarkDistribution::Gamma { shape, scale } => Gamma::new(shape, scale).unwrap().sample(rng),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            MarkDistribution::Constant { value } => value,
            MarkDistribution::Uniform { a, b } => 0.5 * (a + b),
            MarkDistribution::Lognormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            MarkDistribution::Gamma { shape, scale } => shape * scale,
        }
    }

    /// A point `q` with `P(X > q)` negligible (used to truncate integrals).
    pub fn upper_quantile(&self) -> f64 {
        match *self {
            MarkDistribution::Constant { value } => value,
            MarkDistribution::Uniform { b, .. } => b,
            MarkDistribution::Lognormal { mu, sigma } => (mu + 9.0 * sigma).exp(),
            MarkDistribution::Gamma { shape, scale } => scale * (shape + 12.0 * shape.sqrt() + 40.0),
        }
    }

    /// Distribution of `c * X`.
    pub fn scaled(&self, c: f64) -> Self {
        match *self {
            MarkDistribution::Constant { value } => MarkDistribution::Constant { value: c * value },
            MarkDistribution::Uniform { a, b } => MarkDistribution::Uniform { a: c * a, b: c * b },
            MarkDistribution::Lognormal { mu, sigma } => MarkDistribution::Lognormal { mu: mu + c.ln(), sigma },
            MarkDistribution::Gamma { shape, scale } => MarkDistribution::Gamma { shape, scale: c * scale },
        }
    }
}

/// Which mark slot a distribution fills.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkKind {
    Radius,
    Weight,
    Time,
}

/// Optional per-point marks, parallel to the point list.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Marks {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<Vec<f64>>,
    /// Row-major symmetric positive-definite matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
}

impl Marks {
    pub fn is_empty(&self) -> bool {
        self.radius.is_none() && self.weight.is_none() && self.time.is_none() && self.matrix.is_none()
    }

    pub fn slot_mut(&mut self, kind: MarkKind) -> &mut Option<Vec<f64>> {
        match kind {
            MarkKind::Radius => &mut self.radius,
            MarkKind::Weight => &mut self.weight,
            MarkKind::Time => &mut self.time,
        }
    }

    pub fn slot(&self, kind: MarkKind) -> Option<&Vec<f64>> {
        match kind {
            MarkKind::Radius => self.radius.as_ref(),
            MarkKind::Weight => self.weight.as_ref(),
            MarkKind::Time => self.time.as_ref(),
        }
    }

    /// Keeps the marks of the selected indices, in order.
    pub fn select(&self, idx: &[usize]) -> Marks {
        let pick = |v: &Option<Vec<f64>>| v.as_ref().map(|v| idx.iter().map(|&i| v[i]).collect());
        Marks {
            radius: pick(&self.radius),
            weight: pick(&self.weight),
            time: pick(&self.time),
            matrix: self.matrix.as_ref().map(|m| idx.iter().map(|&i| m[i].clone()).collect()),
        }
    }
}

/// Adds i.i.d. marks from `dist` to the pattern.
pub fn attach_marks<P, R: Rng + ?Sized>(
    mut p: super::PointPattern<P>,
    dist: &MarkDistribution,
    kind: MarkKind,
    rng: &mut R,
) -> Result<super::PointPattern<P>> {
    dist.validate()?;
    let v: Vec<f64> = (0..p.points.len()).map(|_| dist.sample(rng)).collect();
    if kind == MarkKind::Radius && v.iter().any(|r| *r < 0.0) {
        return Err(Error::Parameter("radius marks must be nonnegative".into()));
    }
    *p.marks.slot_mut(kind) = Some(v);
    Ok(p)
}
