use rand::Rng;

use super::hyperplane::Line;
use super::polygon::ConvexPolygon;
use super::rose::DirectionRose;
use super::vector::Vector;
use crate::error::{Error, Result};

const MAX_ATTEMPTS: usize = 1_000_000;

/// Draws a line from the rose-driven hyperplane measure restricted to lines hitting `p`.
///
/// Rejection sampling: the normal is drawn from the rose, the offset uniformly over
/// the interval spanned by a ball containing `p`; misses are redrawn.
pub fn sample_chord<R: Rng + ?Sized>(p: &ConvexPolygon, rose: &DirectionRose, rng: &mut R) -> Result<Line> {
    rose.validate()?;
    let (c, r) = p.enclosing_circle();
    for _ in 0..MAX_ATTEMPTS {
        let u = rose.sample_normal(rng);
        let t = c.dot(u) + r * (2.0 * rng.random::<f64>() - 1.0);
        let line = Line { normal: u, offset: t };
        if p.hit_by(&line) {
            return Ok(line);
        }
    }
    Err(Error::DegenerateRose(format!("no hitting line after {MAX_ATTEMPTS} proposals")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::vec2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sub_square_hit_fraction_matches_perimeter_ratio() {
        let sq = ConvexPolygon::unit_square();
        let sub = ConvexPolygon::rect(vec2(0.0, 0.0), vec2(0.5, 0.5));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| sub.hit_by(&sample_chord(&sq, &DirectionRose::Isotropic, &mut rng).unwrap()))
            .count();
        let f = hits as f64 / n as f64;
        let sd = (0.25 / n as f64).sqrt();
        assert!((f - 0.5).abs() < 3.0 * sd, "fraction {f}");
    }

    #[test]
    fn axis_rose_offsets_uniform() {
        let sq = ConvexPolygon::unit_square();
        let rose = DirectionRose::axis_aligned(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 20_000;
        let mut horizontal = 0;
        let mut low = 0;
        for _ in 0..n {
            let l = sample_chord(&sq, &rose, &mut rng).unwrap();
            if l.normal.y.abs() > 0.5 {
                horizontal += 1;
            }
            if l.offset < 0.5 {
                low += 1;
            }
        }
        let sd = (0.25 / n as f64).sqrt();
        assert!((horizontal as f64 / n as f64 - 0.5).abs() < 3.0 * sd);
        assert!((low as f64 / n as f64 - 0.5).abs() < 3.0 * sd);
    }
}
