use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::marks::Marks;
use super::MAX_EXPECTED_POINTS;
use crate::error::{Error, Result};
use crate::geom::{ConvexBody, Vector, Window};

/// Finite point configuration with optional marks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointPattern<P> {
    pub points: Vec<P>,
    #[serde(default, skip_serializing_if = "Marks::is_empty")]
    pub marks: Marks,
}

impl<P> PointPattern<P> {
    pub fn new(points: Vec<P>) -> Self {
        Self { points, marks: Marks::default() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl<P: Vector> PointPattern<P> {
    /// Subpattern of the selected indices, marks included.
    pub fn select(&self, idx: &[usize]) -> Self {
        Self { points: idx.iter().map(|&i| self.points[i]).collect(), marks: self.marks.select(idx) }
    }
}

/// Poisson variate with the given mean; zero mean gives zero.
pub fn sample_poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::Parameter(format!("invalid Poisson mean {mean}")));
    }
    if mean > MAX_EXPECTED_POINTS {
        return Err(Error::Parameter(format!("expected count {mean:.3e} exceeds the {MAX_EXPECTED_POINTS:.0e} guard")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(mean).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(d.sample(rng) as u64)
}

fn uniform_in_box<P: Vector, R: Rng + ?Sized>(lo: P, hi: P, rng: &mut R) -> P {
    let c: Vec<f64> = (0..P::DIM).map(|a| lo.coord(a) + (hi.coord(a) - lo.coord(a)) * rng.random::<f64>()).collect();
    P::from_coords(&c)
}

/// Uniform point in a convex body (rejection from the bounding box).
pub fn uniform_in<B: ConvexBody, R: Rng + ?Sized>(shape: &B, rng: &mut R) -> B::Point {
    let (lo, hi) = shape.bounds();
    loop {
        let p = uniform_in_box(lo, hi, rng);
        if shape.is_axis_box() || shape.contains_point(p, 0.0) {
            return p;
        }
    }
}

/// Homogeneous Poisson process of intensity `lambda` on the effective window.
pub fn sample_poisson<B: ConvexBody, R: Rng + ?Sized>(
    w: &Window<B>,
    lambda: f64,
    rng: &mut R,
) -> Result<PointPattern<B::Point>> {
    if !(lambda >= 0.0) {
        return Err(Error::Parameter(format!("intensity must be nonnegative, got {lambda}")));
    }
    let shape = w.effective_shape();
    let (lo, hi) = shape.bounds();
    let ext = hi - lo;
    let box_content: f64 = (0..B::Point::DIM).map(|a| ext.coord(a)).product();
    let n = sample_poisson_count(lambda * box_content, rng)?;
    let is_box = shape.is_axis_box();
    let mut pts = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let p = uniform_in_box(lo, hi, rng);
        if is_box || shape.contains_point(p, 0.0) {
            pts.push(p);
        }
    }
    Ok(PointPattern::new(pts))
}

/// Keeps each point `x` with probability `intensity(x) / lambda_max`.
pub fn thin_inhomogeneous<P: Vector, R: Rng + ?Sized>(
    p: &PointPattern<P>,
    intensity: impl Fn(P) -> f64,
    lambda_max: f64,
    rng: &mut R,
) -> Result<PointPattern<P>> {
    let mut keep = Vec::new();
    for (i, &x) in p.points.iter().enumerate() {
        let v = intensity(x);
        if !(v >= 0.0 && v <= lambda_max * (1.0 + 1e-12)) {
            return Err(Error::Parameter(format!("intensity {v} outside [0, {lambda_max}]")));
        }
        if rng.random::<f64>() * lambda_max < v {
            keep.push(i);
        }
    }
    Ok(p.select(&keep))
}

fn uniform_in_ball<P: Vector, R: Rng + ?Sized>(c: P, r: f64, rng: &mut R) -> P {
    loop {
        let v: Vec<f64> = (0..P::DIM).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return c + P::from_coords(&v) * r;
        }
    }
}

/// Matérn cluster process: Poisson parents, Poisson(`mean_offspring`) children
/// uniform in a ball of radius `cluster_radius` around each parent.
pub fn sample_matern_cluster<B: ConvexBody, R: Rng + ?Sized>(
    w: &Window<B>,
    lambda_parent: f64,
    mean_offspring: f64,
    cluster_radius: f64,
    rng: &mut R,
) -> Result<PointPattern<B::Point>> {
    if !(lambda_parent >= 0.0 && mean_offspring >= 0.0 && cluster_radius >= 0.0) {
        return Err(Error::Parameter("cluster parameters must be nonnegative".into()));
    }
    let target = w.effective_shape();
    let (lo, hi) = target.bounds();
    let m = B::Point::from_coords(&vec![cluster_radius; B::Point::DIM]);
    let parents = sample_poisson(&Window::new(B::axis_box(lo - m, hi + m), Default::default())?, lambda_parent, rng)?;
    let is_box = target.is_axis_box();
    let mut pts = Vec::new();
    for &c in &parents.points {
        let k = sample_poisson_count(mean_offspring, rng)?;
        for _ in 0..k {
            let p = uniform_in_ball(c, cluster_radius, rng);
            let inside = if is_box {
                (0..B::Point::DIM).all(|a| p.coord(a) >= lo.coord(a) && p.coord(a) <= hi.coord(a))
            } else {
                target.contains_point(p, 0.0)
            };
            if inside {
                pts.push(p);
            }
        }
    }
    Ok(PointPattern::new(pts))
}

/// Result of simple sequential inhibition.
#[derive(Debug, Clone, PartialEq)]
pub struct SsiOutcome<P> {
    pub pattern: PointPattern<P>,
    /// True when `max_attempts` ran out before `target_n` points were placed.
    pub saturated: bool,
}

/// Simple sequential inhibition with hard-core distance `hardcore_r`.
pub fn sample_ssi<B: ConvexBody, R: Rng + ?Sized>(
    w: &Window<B>,
    target_n: usize,
    hardcore_r: f64,
    max_attempts: usize,
    rng: &mut R,
) -> Result<SsiOutcome<B::Point>> {
    if !(hardcore_r >= 0.0) {
        return Err(Error::Parameter(format!("hard-core distance must be >= 0, got {hardcore_r}")));
    }
    let shape = w.effective_shape();
    let r2 = hardcore_r * hardcore_r;
    let mut pts: Vec<B::Point> = Vec::with_capacity(target_n);
    let mut attempts = 0;
    while pts.len() < target_n && attempts < max_attempts {
        attempts += 1;
        let p = uniform_in(&shape, rng);
        if hardcore_r == 0.0 || pts.iter().all(|q| (*q - p).norm2() >= r2) {
            pts.push(p);
        }
    }
    let saturated = pts.len() < target_n;
    Ok(SsiOutcome { pattern: PointPattern::new(pts), saturated })
}

/// All `3^d` periodic translates of the points; the first `n` entries are the originals.
/// Each entry carries the index of the original point.
pub fn periodic_copies<P: Vector>(points: &[P], extent: P) -> Vec<(P, usize)> {
    let d = P::DIM;
    let shifts: Vec<P> = (0..3usize.pow(d as u32))
        .map(|k| {
            let c: Vec<f64> = (0..d).map(|a| ((k / 3usize.pow(a as u32)) % 3) as f64 - 1.0).collect();
            c
        })
        .filter(|c| c.iter().any(|x| *x != 0.0))
        .map(|c| P::from_coords(&(0..d).map(|a| c[a] * extent.coord(a)).collect::<Vec<_>>()))
        .collect();
    let mut out: Vec<(P, usize)> = points.iter().copied().zip(0..).collect();
    for s in shifts {
        out.extend(points.iter().enumerate().map(|(i, &p)| (p + s, i)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{ConvexPolygon, EdgeMode, Vec2};
    use crate::process::Seed;

    #[test]
    fn poisson_mean_count_and_plus_scaling() {
        let w = Window::unit_square();
        let reps = 1000;
        let mean = (0..reps)
            .map(|i| sample_poisson(&w, 100.0, &mut Seed::new(1).rng(i, "pp")).unwrap().len() as f64)
            .sum::<f64>()
            / reps as f64;
        assert!((mean - 100.0).abs() < 3.0 * (100.0f64 / reps as f64).sqrt(), "{mean}");

        let wp = Window::new(ConvexPolygon::unit_square(), EdgeMode::Plus { margin: 0.2 }).unwrap();
        let mean = (0..reps)
            .map(|i| sample_poisson(&wp, 100.0, &mut Seed::new(2).rng(i, "pp")).unwrap().len() as f64)
            .sum::<f64>()
            / reps as f64;
        assert!((mean - 196.0).abs() < 3.0 * (196.0f64 / reps as f64).sqrt(), "{mean}");
    }

    #[test]
    fn poisson_deterministic_and_guarded() {
        let w = Window::unit_square();
        let a = sample_poisson(&w, 50.0, &mut Seed::new(9).rng(0, "x")).unwrap();
        let b = sample_poisson(&w, 50.0, &mut Seed::new(9).rng(0, "x")).unwrap();
        assert_eq!(a, b);
        assert!(sample_poisson(&w, 1e9, &mut Seed::new(9).rng(0, "x")).is_err());
    }

    #[test]
    fn matern_limits() {
        let w = Window::unit_square();
        let mut rng = Seed::new(3).rng(0, "m");
        assert!(sample_matern_cluster(&w, 10.0, 0.0, 0.05, &mut rng).unwrap().is_empty());
        let p = sample_matern_cluster(&w, 10.0, 5.0, 0.0, &mut rng).unwrap();
        let mut xs: Vec<Vec2> = p.points.clone();
        xs.dedup();
        assert!(xs.len() <= p.len());
    }

    #[test]
    fn matern_mean_intensity() {
        let w = Window::unit_square();
        let reps = 1000;
        let mean = (0..reps)
            .map(|i| sample_matern_cluster(&w, 10.0, 10.0, 0.05, &mut Seed::new(4).rng(i, "m")).unwrap().len() as f64)
            .sum::<f64>()
            / reps as f64;
        // Var of a cluster count is about lambda_p * (m + m^2) * area.
        let sd = (10.0 * 110.0 / reps as f64).sqrt();
        assert!((mean - 100.0).abs() < 3.0 * sd, "{mean}");
    }

    #[test]
    fn ssi_hardcore_and_saturation() {
        let w = Window::unit_square();
        let mut saturated = 0;
        for i in 0..100 {
            let o = sample_ssi(&w, 200, 0.05, 100_000, &mut Seed::new(5).rng(i, "ssi")).unwrap();
            saturated += o.saturated as usize;
            let p = &o.pattern.points;
            for a in 0..p.len() {
                for b in a + 1..p.len() {
                    assert!(p[a].dist(p[b]) >= 0.05);
                }
            }
        }
        assert!(saturated <= 1);
        let o = sample_ssi(&w, 30, 0.0, 30, &mut Seed::new(5).rng(0, "ssi")).unwrap();
        assert_eq!(o.pattern.len(), 30);
        assert!(!o.saturated);
    }

    #[test]
    fn periodic_copies_layout() {
        let pts = vec![Vec2 { x: 0.1, y: 0.2 }];
        let c = periodic_copies(&pts, Vec2 { x: 1.0, y: 1.0 });
        assert_eq!(c.len(), 9);
        assert_eq!(c[0], (pts[0], 0));
    }
}
