use rand::Rng;

use super::points::sample_poisson_count;
use crate::error::{Error, Result};
use crate::geom::{
    ConvexBody, ConvexPolygon, ConvexPolyhedron, DirectionRose, Hyperplane, Line, Plane, SphericalRose, Vector, Window,
};

fn sample_hyperplanes<B: ConvexBody, R: Rng + ?Sized>(
    shape: &B,
    lambda: f64,
    rng: &mut R,
    mut normal: impl FnMut(&mut R) -> B::Point,
) -> Result<Vec<Hyperplane<B::Point>>> {
    if !(lambda >= 0.0) {
        return Err(Error::Parameter(format!("intensity must be nonnegative, got {lambda}")));
    }
    let (c, r) = shape.bounding_ball();
    // Hyperplanes hitting the ball have measure lambda times its width.
    let n = sample_poisson_count(lambda * 2.0 * r, rng)?;
    let mut out = Vec::new();
    for _ in 0..n {
        let u = normal(rng);
        let t = c.dot(u) + r * (2.0 * rng.random::<f64>() - 1.0);
        let h = Hyperplane { normal: u, offset: t };
        if shape.crosses(&h) {
            out.push(h);
        }
    }
    Ok(out)
}

/// Poisson line process hitting the (effective) window; `lambda` is the
/// mean line length per unit area.
pub fn sample_poisson_lines<R: Rng + ?Sized>(
    w: &Window<ConvexPolygon>,
    lambda: f64,
    rose: &DirectionRose,
    rng: &mut R,
) -> Result<Vec<Line>> {
    rose.validate()?;
    sample_hyperplanes(&w.effective_shape(), lambda, rng, |r| rose.sample_normal(r))
}

/// Poisson plane process hitting the (effective) window; `lambda` is the
/// mean plane area per unit volume.
pub fn sample_poisson_planes<R: Rng + ?Sized>(
    w: &Window<ConvexPolyhedron>,
    lambda: f64,
    rose: &SphericalRose,
    rng: &mut R,
) -> Result<Vec<Plane>> {
    rose.validate()?;
    sample_hyperplanes(&w.effective_shape(), lambda, rng, |r| rose.sample_normal(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::Seed;
    use std::f64::consts::PI;

    #[test]
    fn line_hits_and_length() {
        let w = Window::unit_square();
        let reps = 2000;
        let mut hits = 0usize;
        let mut len = 0.0;
        for i in 0..reps {
            let ls = sample_poisson_lines(&w, PI, &DirectionRose::Isotropic, &mut Seed::new(1).rng(i, "l")).unwrap();
            hits += ls.len();
            let ls2 = sample_poisson_lines(&w, 2.0, &DirectionRose::Isotropic, &mut Seed::new(2).rng(i, "l")).unwrap();
            len += ls2.iter().filter_map(|l| w.shape.chord(l)).map(|(a, b)| a.dist(b)).sum::<f64>();
        }
        let m = hits as f64 / reps as f64;
        assert!((m - 4.0).abs() < 3.0 * (4.0 / reps as f64).sqrt(), "{m}");
        let l = len / reps as f64;
        // Each hitting line contributes a chord of mean length pi*A/L; bound the sd loosely.
        assert!((l - 2.0).abs() < 3.0 * (8.0 / PI * 1.0 / reps as f64).sqrt(), "{l}");
        assert!(sample_poisson_lines(&w, 0.0, &DirectionRose::Isotropic, &mut Seed::new(1).rng(0, "l"))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn plane_hits_cube() {
        let w = Window::unit_cube();
        let reps = 4000;
        let hits: usize = (0..reps)
            .map(|i| sample_poisson_planes(&w, 1.0, &SphericalRose::Isotropic, &mut Seed::new(3).rng(i, "p")).unwrap().len())
            .sum();
        let m = hits as f64 / reps as f64;
        assert!((m - 1.5).abs() < 3.0 * (1.5 / reps as f64).sqrt(), "{m}");
        let hits2: usize = (0..reps)
            .map(|i| sample_poisson_planes(&w, 2.0, &SphericalRose::Isotropic, &mut Seed::new(4).rng(i, "p")).unwrap().len())
            .sum();
        let m2 = hits2 as f64 / reps as f64;
        assert!((m2 - 3.0).abs() < 3.0 * (3.0 / reps as f64).sqrt(), "{m2}");
    }
}
