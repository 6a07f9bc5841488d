use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, EdgeMode, Window};
use crate::process::Seed;
use crate::tess::PlanarTessellation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IterateMode {
    /// Independent component per cell of the frame.
    #[default]
    Nest,
    /// One component intersected with every cell.
    Superpose,
}

/// Component generator: tessellation of the given window from the given seed.
pub type ComponentGen<'a> = dyn Fn(&Window<ConvexPolygon>, Seed) -> Result<PlanarTessellation> + Sync + 'a;

fn bbox_window(c: &ConvexPolygon) -> Window<ConvexPolygon> {
    let (lo, hi) = c.bbox();
    Window { shape: ConvexPolygon::rect(lo, hi), edge_mode: EdgeMode::None }
}

fn overlaps(a: &(crate::geom::Vec2, crate::geom::Vec2), b: &(crate::geom::Vec2, crate::geom::Vec2)) -> bool {
    a.0.x < b.1.x && b.0.x < a.1.x && a.0.y < b.1.y && b.0.y < a.1.y
}

/// Pieces of `c` cut out by the cells of `t`.
fn restrict(c: &ConvexPolygon, t: &PlanarTessellation) -> Vec<ConvexPolygon> {
    let bc = c.bbox();
    t.cells.iter().filter(|k| overlaps(&bc, &k.bbox())).filter_map(|k| c.intersect(k)).collect()
}

/// Iteration of a frame tessellation `t0` with components from `gen`.
///
/// In nest mode each frame cell is kept whole unless selected with probability
/// `bernoulli_p`; a selected cell is cut by its own component, simulated on the
/// cell's bounding box. Cells are processed in parallel and returned in frame order.
pub fn iterate(
    t0: &PlanarTessellation,
    gen: &ComponentGen<'_>,
    mode: IterateMode,
    bernoulli_p: f64,
    seed: Seed,
) -> Result<PlanarTessellation> {
    if !(0.0..=1.0).contains(&bernoulli_p) {
        return Err(Error::Parameter(format!("bernoulli_p must lie in [0, 1], got {bernoulli_p}")));
    }
    if t0.is_periodic() {
        return Err(Error::Parameter("iteration of periodic tessellations is not supported".into()));
    }
    let (cells, parents): (Vec<ConvexPolygon>, Vec<usize>) = match mode {
        IterateMode::Nest => {
            let parts: Vec<Result<Vec<ConvexPolygon>>> = t0
                .cells
                .par_iter()
                .enumerate()
                .map(|(i, c)| {
                    let take = seed.rng(i as u64, "select").random::<f64>() < bernoulli_p;
                    if !take {
                        return Ok(vec![c.clone()]);
                    }
                    let comp = gen(&bbox_window(c), seed.derive(i as u64, "component"))?;
                    Ok(restrict(c, &comp))
                })
                .collect();
            let mut cells = Vec::new();
            let mut parents = Vec::new();
            for (i, p) in parts.into_iter().enumerate() {
                let p = p?;
                parents.extend(std::iter::repeat_n(i, p.len()));
                cells.extend(p);
            }
            (cells, parents)
        }
        IterateMode::Superpose => {
            let comp = gen(&bbox_window(&t0.domain), seed.derive(0, "component"))?;
            let parts: Vec<Vec<ConvexPolygon>> = t0.cells.par_iter().map(|c| restrict(c, &comp)).collect();
            let mut cells = Vec::new();
            let mut parents = Vec::new();
            for (i, p) in parts.into_iter().enumerate() {
                parents.extend(std::iter::repeat_n(i, p.len()));
                cells.extend(p);
            }
            (cells, parents)
        }
    };
    let mut t = PlanarTessellation::from_cells(format!("iterate({})", t0.model), t0.window.clone(), cells);
    t.cell_generator = parents.into_iter().map(Some).collect();
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::voronoi;
    use crate::geom::DirectionRose;
    use crate::hyperplane::poisson_line_tessellation;
    use crate::process::sample_poisson;
    use approx::assert_relative_eq;

    fn frame() -> PlanarTessellation {
        let w = Window::unit_square();
        let p = sample_poisson(&w, 20.0, &mut Seed::new(1).rng(0, "p")).unwrap();
        voronoi(&p, &w).unwrap()
    }

    fn plt(w: &Window<ConvexPolygon>, s: Seed) -> Result<PlanarTessellation> {
        poisson_line_tessellation(w, 8.0, &DirectionRose::Isotropic, &mut s.rng(0, "plt"))
    }

    #[test]
    fn zero_probability_keeps_frame() {
        let t0 = frame();
        let t = iterate(&t0, &plt, IterateMode::Nest, 0.0, Seed::new(2)).unwrap();
        assert_eq!(t.cells, t0.cells);
    }

    #[test]
    fn nest_plt_into_voronoi() {
        let t0 = frame();
        let t = iterate(&t0, &plt, IterateMode::Nest, 1.0, Seed::new(3)).unwrap();
        assert_relative_eq!(t.total_area(), 1.0, epsilon = 1e-9);
        assert!(t.len() > t0.len());
        for (c, p) in t.cells.iter().zip(&t.cell_generator) {
            let g = c.centroid();
            let owners: Vec<usize> = (0..t0.len()).filter(|&i| t0.cells[i].contains(g, 0.0)).collect();
            assert_eq!(owners, vec![p.unwrap()]);
        }
    }

    #[test]
    fn superposition_refines_both() {
        let t0 = frame();
        let w = Window::unit_square();
        let comp = plt(&w, Seed::new(4).derive(0, "component")).unwrap();
        let t = iterate(&t0, &plt, IterateMode::Superpose, 1.0, Seed::new(4)).unwrap();
        assert!(t.len() >= t0.len().max(comp.len()));
        assert_relative_eq!(t.total_area(), 1.0, epsilon = 1e-9);
    }
}
