use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::diagram::power_diagram;
use crate::error::{Error, Result};
use crate::geom::{ConvexBody, ConvexPolygon, Vec2, Window};
use crate::process::{sample_poisson_count, uniform_in, PointPattern};
use crate::tess::PlanarTessellation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaVariant {
    Beta,
    BetaPrime,
}

/// Space dimension of the (location, height) process for planar output.
const D: f64 = 3.0;

/// Normalising constant of the height density for the chosen variant.
pub fn beta_constant(beta: f64, variant: BetaVariant) -> f64 {
    match variant {
        BetaVariant::Beta => gamma(D / 2.0 + beta + 1.0) / (PI.powf(D / 2.0) * gamma(beta + 1.0)),
        BetaVariant::BetaPrime => gamma(beta) / (PI.powf(D / 2.0) * gamma(beta - D / 2.0)),
    }
}

/// Height bound: upper truncation `h_max` for the beta variant, lower truncation of
/// `|h|` for the beta-prime variant.
pub fn default_height_bound(gamma_: f64, beta: f64, variant: BetaVariant, content: f64) -> f64 {
    let c = beta_constant(beta, variant);
    match variant {
        BetaVariant::Beta => {
            // Expected number of generators that dominate a point at height t at its own
            // location is gamma*c*pi*t^(beta+2)/((beta+1)(beta+2)). Solve for a 1e-3 chance
            // over the window, then widen by 25% since a cell may survive away from its
            // generator's location.
            let n_eff = (gamma_ * content).max(1.0);
            let target = (1000.0 * n_eff).ln();
            1.25 * (target * (beta + 1.0) * (beta + 2.0) / (gamma_ * c * PI)).powf(1.0 / (beta + 2.0))
        }
        BetaVariant::BetaPrime => {
            // Keep about 50 generators per unit of gamma-content.
            (c / (50.0 * (beta - 1.0))).powf(1.0 / (beta - 1.0))
        }
    }
}

/// Beta- or beta-prime-Delaunay tessellation: the dual of the Laguerre diagram of a
/// Poisson process of (location, height) pairs with weights `-h`.
pub fn beta_delaunay<R: Rng + ?Sized>(
    gamma_: f64,
    beta: f64,
    variant: BetaVariant,
    w: &Window<ConvexPolygon>,
    height_bound: Option<f64>,
    rng: &mut R,
) -> Result<PlanarTessellation> {
    if !(gamma_ > 0.0) {
        return Err(Error::Parameter(format!("gamma must be positive, got {gamma_}")));
    }
    match variant {
        BetaVariant::Beta if !(beta > -1.0) => return Err(Error::Parameter(format!("beta must exceed -1, got {beta}"))),
        BetaVariant::BetaPrime if !(beta > D / 2.0) => {
            return Err(Error::Parameter(format!("beta' must exceed {}, got {beta}", D / 2.0)))
        }
        _ => {}
    }
    let shape = w.effective_shape();
    let content = shape.content();
    let c = beta_constant(beta, variant);
    let hb = height_bound.unwrap_or_else(|| default_height_bound(gamma_, beta, variant, content));
    if !(hb > 0.0) {
        return Err(Error::Parameter(format!("height bound must be positive, got {hb}")));
    }
    let (mean, sample_h): (f64, Box<dyn Fn(f64) -> f64>) = match variant {
        BetaVariant::Beta => (
            gamma_ * c * content * hb.powf(beta + 1.0) / (beta + 1.0),
            Box::new(move |u: f64| hb * u.powf(1.0 / (beta + 1.0))),
        ),
        BetaVariant::BetaPrime => (
            gamma_ * c * content * hb.powf(1.0 - beta) / (beta - 1.0),
            Box::new(move |u: f64| -hb * (1.0 - u).powf(-1.0 / (beta - 1.0))),
        ),
    };
    let n = sample_poisson_count(mean, rng)?;
    let mut pts = Vec::with_capacity(n as usize);
    let mut heights = Vec::with_capacity(n as usize);
    for _ in 0..n {
        pts.push(uniform_in(&shape, rng));
        heights.push(sample_h(rng.random::<f64>()));
    }
    if pts.len() < 3 {
        return Err(Error::InsufficientSample(format!("only {} generators sampled", pts.len())));
    }
    let weights: Vec<f64> = heights.iter().map(|h| -h).collect();
    let mut pattern = PointPattern::new(pts);
    pattern.marks.weight = Some(weights.clone());
    let lag = power_diagram(&pattern, &weights, w, "laguerre")?;

    let near_bound = match variant {
        BetaVariant::Beta => lag.cell_generator.iter().flatten().any(|&g| heights[g] > 0.99 * hb),
        BetaVariant::BetaPrime => false,
    };
    if near_bound {
        log::warn!("visible generator within 1% of the height bound {hb}");
    }

    let mut cells = Vec::new();
    let l = &lag.lattice;
    for v in l.interior_vertices() {
        let gens: Vec<usize> = l.vertex_cells[v].iter().filter_map(|&c| lag.cell_generator[c]).collect();
        if gens.len() < 3 {
            continue;
        }
        let ring: Vec<Vec2> = gens.iter().map(|&g| pattern.points[g]).collect();
        if let Some(poly) = ConvexPolygon::hull(&ring) {
            if let Some(cl) = poly.intersect(&shape) {
                cells.push(cl);
            }
        }
    }
    let mut t = PlanarTessellation::from_cells("beta-delaunay", w.clone(), cells);
    t.diagnostics.insert("height_bound".into(), hb);
    t.diagnostics.insert("generators".into(), pattern.len() as f64);
    t.diagnostics.insert("hidden_generators".into(), lag.empty_cells.len() as f64);
    t.diagnostics.insert("height_bound_flag".into(), near_bound as u8 as f64);
    t.generators = Some(pattern);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{vec2, EdgeMode};
    use crate::process::Seed;
    use approx::assert_relative_eq;

    #[test]
    fn constants() {
        // beta = 0, d = 3: Gamma(5/2) / pi^(3/2).
        assert_relative_eq!(beta_constant(0.0, BetaVariant::Beta), gamma(2.5) / PI.powf(1.5), epsilon = 1e-14);
        assert!(beta_constant(2.5, BetaVariant::BetaPrime) > 0.0);
    }

    #[test]
    fn doubling_gamma_adds_cells() {
        let w = Window::new(ConvexPolygon::rect(vec2(0.0, 0.0), vec2(5.0, 5.0)), EdgeMode::None).unwrap();
        let mut more = 0;
        let reps = 20;
        for i in 0..reps {
            let a = beta_delaunay(1.0, 5.0, BetaVariant::Beta, &w, None, &mut Seed::new(1).rng(i, "b")).unwrap();
            let b = beta_delaunay(2.0, 5.0, BetaVariant::Beta, &w, None, &mut Seed::new(1).rng(i, "b")).unwrap();
            more += (b.len() > a.len()) as usize;
            assert_eq!(a.diagnostics["height_bound_flag"], 0.0);
        }
        assert!(more >= 18, "{more}");
    }

    #[test]
    fn beta_prime_runs() {
        let w = Window::new(ConvexPolygon::rect(vec2(0.0, 0.0), vec2(5.0, 5.0)), EdgeMode::None).unwrap();
        let t = beta_delaunay(1.0, 2.5, BetaVariant::BetaPrime, &w, None, &mut Seed::new(2).rng(0, "b")).unwrap();
        assert!(t.len() > 5);
        assert!(beta_delaunay(1.0, 1.0, BetaVariant::BetaPrime, &w, None, &mut Seed::new(2).rng(0, "b")).is_err());
    }
}
