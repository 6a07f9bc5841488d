use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, Gamma, LogNormal};
use statrs::function::factorial::factorial;
use statrs::function::gamma::gamma;

use super::quad::{integrate, integrate_half_line};
use crate::error::{Error, Result};
use crate::process::MarkDistribution;

/// Analytic mean values of a stationary model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Oracle {
    pub model: String,
    pub dim: usize,
    pub params: BTreeMap<String, f64>,
    pub values: BTreeMap<String, f64>,
}

impl Oracle {
    fn new(model: &str, dim: usize, params: &[(&str, f64)], values: &[(&str, f64)]) -> Self {
        Self {
            model: model.into(),
            dim,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }
}

fn check_intensity(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("intensity must be positive, got {lambda}")))
    }
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma(1.0 + d as f64 / 2.0)
}

/// `mu_k` of a stationary Poisson-Voronoi tessellation in `R^d`.
pub fn poisson_voronoi_mu(lambda: f64, d: usize, k: usize) -> f64 {
    let (df, kf) = (d as f64, k as f64);
    let m = df - kf;
    let num = 2f64.powf(m + 1.0)
        * PI.powf(m / 2.0)
        * gamma(m + kf / df)
        * gamma((df * df - df * kf + kf + 1.0) / 2.0)
        * gamma(1.0 + df / 2.0).powf(m + kf / df);
    let den = df
        * factorial((d - k + 1) as u64)
        * gamma((kf + 1.0) / 2.0)
        * gamma((df * df - df * kf + kf) / 2.0)
        * gamma((df + 1.0) / 2.0).powf(m);
    lambda.powf(m / df) * num / den
}

/// Poisson-Voronoi mean values for `d = 2` or `3`.
pub fn oracle_poisson_voronoi(lambda: f64, d: usize) -> Result<Oracle> {
    check_intensity(lambda)?;
    match d {
        2 => {
            let mu1 = poisson_voronoi_mu(lambda, 2, 1);
            let s = lambda.sqrt();
            Ok(Oracle::new(
                "pv2",
                2,
                &[("lambda", lambda)],
                &[
                    ("gamma0", 2.0 * lambda),
                    ("gamma1", 3.0 * lambda),
                    ("gamma2", lambda),
                    ("mu0", 2.0 * lambda),
                    ("mu1", mu1),
                    ("mu2", 1.0),
                    ("N02", 3.0),
                    ("N20", 6.0),
                    ("L1", 2.0 / (3.0 * s)),
                    ("P2", 4.0 / s),
                    ("A2", 1.0 / lambda),
                ],
            ))
        }
        3 => {
            let c = 24.0 * PI * PI / 35.0;
            let mu1 = poisson_voronoi_mu(lambda, 3, 1);
            let mu2 = poisson_voronoi_mu(lambda, 3, 2);
            let (g0, g1, g2) = (c * lambda, 2.0 * c * lambda, (c + 1.0) * lambda);
            Ok(Oracle::new(
                "pv3",
                3,
                &[("lambda", lambda)],
                &[
                    ("gamma0", g0),
                    ("gamma1", g1),
                    ("gamma2", g2),
                    ("gamma3", lambda),
                    ("mu0", g0),
                    ("mu1", mu1),
                    ("mu2", mu2),
                    ("mu3", 1.0),
                    ("N03", 4.0),
                    ("N21", 144.0 * PI * PI / (24.0 * PI * PI + 35.0)),
                    ("N30", 96.0 * PI * PI / 35.0),
                    ("N31", 144.0 * PI * PI / 35.0),
                    ("N32", 48.0 * PI * PI / 35.0 + 2.0),
                    ("L1", mu1 / g1),
                    ("A2", mu2 / g2),
                    // every edge lies on three facets
                    ("P2", 3.0 * mu1 / g2),
                    ("V3", 1.0 / lambda),
                    ("S3", 2.0 * mu2 / lambda),
                    ("L3", 3.0 * mu1 / lambda),
                    ("B3", mu1 / (4.0 * lambda)),
                ],
            ))
        }
        _ => Err(Error::Parameter(format!("Poisson-Voronoi oracle needs d in {{2, 3}}, got {d}"))),
    }
}

/// Poisson line tessellation with mean line length `lambda` per unit area.
pub fn oracle_poisson_line(lambda: f64) -> Result<Oracle> {
    check_intensity(lambda)?;
    Ok(line_values("plt", lambda, &[("lambda", lambda)]))
}

/// STIT stopped at time `a`: its typical cell is that of the line tessellation with `lambda = a`.
pub fn oracle_stit(a: f64) -> Result<Oracle> {
    check_intensity(a)?;
    let mut o = line_values("stit", a, &[("a", a)]);
    // All vertices are T-vertices, so the face counts follow from gamma2 as in a normal tessellation.
    let g = o.values["gamma2"];
    for (k, v) in [("gamma0", 2.0 * g), ("mu0", 2.0 * g), ("gamma1", 3.0 * g), ("N02", 3.0), ("N20", 6.0), ("L1", a / (3.0 * g))] {
        o.values.insert(k.into(), v);
    }
    Ok(o)
}

fn line_values(model: &str, lambda: f64, params: &[(&str, f64)]) -> Oracle {
    let rho = 2.0 * lambda / PI;
    let g = PI * rho * rho / 4.0;
    Oracle::new(
        model,
        2,
        params,
        &[
            ("gamma0", g),
            ("gamma1", 2.0 * g),
            ("gamma2", g),
            ("mu0", g),
            ("mu1", lambda),
            ("mu2", 1.0),
            ("N02", 4.0),
            ("N20", 4.0),
            ("corners", 4.0),
            ("L1", 1.0 / rho),
            ("A2", 4.0 / (PI * rho * rho)),
            ("P2", 2.0 * lambda / g),
        ],
    )
}

/// Poisson-Delaunay mean values in the plane; `lambda` is the vertex intensity.
pub fn oracle_poisson_delaunay(lambda: f64) -> Result<Oracle> {
    check_intensity(lambda)?;
    let s = lambda.sqrt();
    let l1 = 32.0 / (9.0 * PI * s);
    Ok(Oracle::new(
        "pdt",
        2,
        &[("lambda", lambda)],
        &[
            ("gamma0", lambda),
            ("gamma1", 3.0 * lambda),
            ("gamma2", 2.0 * lambda),
            ("mu0", lambda),
            ("mu1", 3.0 * lambda * l1),
            ("mu2", 1.0),
            ("N02", 6.0),
            ("N20", 3.0),
            ("L1", l1),
            ("A2", 1.0 / (2.0 * lambda)),
            ("P2", 32.0 / (3.0 * PI * s)),
        ],
    ))
}

/// `E[(t - S)^j; S <= t]` for birth times `S ~ q`.
fn truncated_moment(q: &MarkDistribution, t: f64, j: i32) -> Result<f64> {
    Ok(match *q {
        MarkDistribution::Constant { value } => {
            if t >= value {
                (t - value).powi(j)
            } else {
                0.0
            }
        }
        MarkDistribution::Uniform { a, b } => {
            if t <= a {
                0.0
            } else if b <= a {
                (t - a).powi(j)
            } else {
                let hi = t.min(b);
                ((t - a).powi(j + 1) - (t - hi).powi(j + 1)) / ((j + 1) as f64 * (b - a))
            }
        }
        MarkDistribution::Lognormal { mu, sigma } => {
            if t <= 0.0 {
                return Ok(0.0);
            }
            let d = LogNormal::new(mu, sigma).map_err(|e| Error::Numeric(e.to_string()))?;
            integrate(|s| if s > 0.0 { (t - s).powi(j) * d.pdf(s) } else { 0.0 }, 0.0, t, 1e-10)?
        }
        MarkDistribution::Gamma { shape, scale } => {
            if t <= 0.0 {
                return Ok(0.0);
            }
            let d = Gamma::new(shape, 1.0 / scale).map_err(|e| Error::Numeric(e.to_string()))?;
            integrate(|s| if s > 0.0 { (t - s).powi(j) * d.pdf(s) } else { 0.0 }, 0.0, t, 1e-10)?
        }
    })
}

/// `c_{dk}` in the Johnson–Mehl mean-value integral.
fn jm_constant(d: usize, k: usize) -> f64 {
    let m = (d - k) as f64;
    let (df, kf) = (d as f64, k as f64);
    2f64.powf(m + 1.0) * PI.powf((m + 1.0) * df / 2.0) * gamma((df * m + kf + 1.0) / 2.0)
        / (factorial((d - k + 1) as u64)
            * gamma((df * m + kf) / 2.0)
            * gamma((df + 1.0) / 2.0).powf(m)
            * gamma((kf + 1.0) / 2.0))
}

/// `mu_k` of a Poisson Johnson–Mehl tessellation, `0 < k < d`.
///
/// Generators arrive with intensity `lambda` and birth times `S ~ q`; with
/// `m = d - k`,
/// `mu_k = lambda^(m+1) c_dk int_0^inf E[(t-S)^(d-1); S<=t]^(m+1) exp(-lambda kappa_d E[(t-S)^d; S<=t]) dt`.
pub fn oracle_johnson_mehl_mu(lambda: f64, q: &MarkDistribution, d: usize, k: usize) -> Result<f64> {
    check_intensity(lambda)?;
    q.validate()?;
    if !(0 < k && k < d) {
        return Err(Error::Parameter(format!("need 0 < k < d, got k = {k}, d = {d}")));
    }
    let m = (d - k) as i32;
    let kappa = unit_ball_volume(d);
    let mut failure = None;
    let v = integrate_half_line(
        |t| {
            let inner = truncated_moment(q, t, d as i32 - 1).and_then(|a| Ok((a, truncated_moment(q, t, d as i32)?)));
            match inner {
                Ok((a, b)) => a.powi(m + 1) * (-lambda * kappa * b).exp(),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        1e-8,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(lambda.powi(m + 1) * jm_constant(d, k) * v)
}
