use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{sample_chord, point_segment_distance, ConvexPolygon, DirectionRose, Line, Vec2, Vector, Window};
use crate::process::Seed;
use crate::tess::PlanarTessellation;

/// Cell count beyond which division stops with a resource error.
pub const MAX_CELLS: usize = 1_000_000;
const ASA_RESAMPLES: usize = 100;
const RD_GRID: usize = 16;
const GOLDEN_STEPS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LifetimeRule {
    /// Rate `Λ([C])`.
    LStit,
    /// Rate equal to the cell area.
    LArea,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivisionRule {
    /// Chord from `Λ` restricted to lines hitting the cell.
    DStit,
    /// Rose direction, offset normal around the gravity centre.
    DGauss,
    /// Rose direction, offset maximising the smaller shape factor.
    DRdmin,
    /// Rose direction, offset maximising the sum of squared shape factors.
    DRdssq,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StopRule {
    Time { a: f64 },
    Cells { n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisionConfig {
    pub lifetime: LifetimeRule,
    pub division: DivisionRule,
    /// Minimum angle between a new chord and the sides it ends on (0 disables).
    #[serde(default)]
    pub asa_min_angle: f64,
    #[serde(default)]
    pub rose: DirectionRose,
    pub stop: StopRule,
}

impl DivisionConfig {
    pub fn stit(a: f64, rose: DirectionRose) -> Self {
        Self { lifetime: LifetimeRule::LStit, division: DivisionRule::DStit, asa_min_angle: 0.0, rose, stop: StopRule::Time { a } }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.asa_min_angle >= 0.0 && self.asa_min_angle < FRAC_PI_2) {
            return Err(Error::Parameter(format!("asa_min_angle must lie in [0, pi/2), got {}", self.asa_min_angle)));
        }
        match self.stop {
            StopRule::Time { a } if !(a > 0.0 && a.is_finite()) => {
                return Err(Error::Parameter(format!("stopping time must be positive, got {a}")))
            }
            StopRule::Cells { n: 0 } => return Err(Error::Parameter("target cell count must be positive".into())),
            _ => {}
        }
        self.rose.validate()
    }
}

/// Shape factor `4 pi A / P^2` of a piece, `-inf` when the split produced nothing.
fn rd(p: &Option<ConvexPolygon>) -> f64 {
    p.as_ref().map_or(f64::NEG_INFINITY, |c| c.roundness())
}

/// Offset interval `(lo, hi)` of lines with normal `u` crossing `c`.
fn offset_range(c: &ConvexPolygon, u: Vec2) -> (f64, f64) {
    (-c.support(-u), c.support(u))
}

fn optimise_offset(c: &ConvexPolygon, u: Vec2, score: impl Fn(f64, f64) -> f64) -> f64 {
    let (lo, hi) = offset_range(c, u);
    let f = |t: f64| {
        let (a, b) = c.split(&Line { normal: u, offset: t });
        score(rd(&a), rd(&b))
    };
    let h = (hi - lo) / RD_GRID as f64;
    let (mut best, mut fb) = (lo + 0.5 * h, f64::NEG_INFINITY);
    for k in 0..RD_GRID {
        let t = lo + (k as f64 + 0.5) * h;
        let v = f(t);
        if v > fb {
            best = t;
            fb = v;
        }
    }
    // Golden-section refinement around the best grid point.
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = ((best - h).max(lo + 1e-9 * h), (best + h).min(hi - 1e-9 * h));
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_STEPS {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    let t = 0.5 * (a + b);
    if f(t) >= fb {
        t
    } else {
        best
    }
}

/// Smallest angle between `line` and the cell sides at its chord endpoints.
pub fn chord_min_angle(c: &ConvexPolygon, line: &Line) -> f64 {
    let Some((p, q)) = c.chord(line) else { return 0.0 };
    let d = line.direction();
    [p, q]
        .iter()
        .map(|&x| {
            let (a, b) = c
                .edges()
                .min_by(|e, f| point_segment_distance(x, e.0, e.1).total_cmp(&point_segment_distance(x, f.0, f.1)))
                .unwrap();
            let e = (b - a) / (b - a).norm();
            d.cross(e).abs().min(1.0).asin()
        })
        .fold(FRAC_PI_2, f64::min)
}

fn propose<R: Rng + ?Sized>(c: &ConvexPolygon, cfg: &DivisionConfig, rng: &mut R) -> Result<Line> {
    match cfg.division {
        DivisionRule::DStit => sample_chord(c, &cfg.rose, rng),
        DivisionRule::DGauss => {
            let u = cfg.rose.sample_normal(rng);
            let (lo, hi) = offset_range(c, u);
            let n = Normal::new(c.centroid().dot(u), (hi - lo) / 6.0).map_err(|e| Error::Numeric(e.to_string()))?;
            loop {
                let t = n.sample(rng);
                let l = Line { normal: u, offset: t };
                if t > lo && t < hi && c.hit_by(&l) {
                    return Ok(l);
                }
            }
        }
        DivisionRule::DRdmin => {
            let u = cfg.rose.sample_normal(rng);
            Ok(Line { normal: u, offset: optimise_offset(c, u, f64::min) })
        }
        DivisionRule::DRdssq => {
            let u = cfg.rose.sample_normal(rng);
            Ok(Line { normal: u, offset: optimise_offset(c, u, |a, b| a * a + b * b) })
        }
    }
}

/// Line splitting `c`, honouring the small-angle rule. Returns the line and whether resampling ran out.
fn choose_split<R: Rng + ?Sized>(c: &ConvexPolygon, cfg: &DivisionConfig, rng: &mut R) -> Result<(Line, bool)> {
    let mut line = propose(c, cfg, rng)?;
    if cfg.asa_min_angle <= 0.0 {
        return Ok((line, false));
    }
    for _ in 0..ASA_RESAMPLES {
        if chord_min_angle(c, &line) >= cfg.asa_min_angle {
            return Ok((line, false));
        }
        line = propose(c, cfg, rng)?;
    }
    let ok = chord_min_angle(c, &line) >= cfg.asa_min_angle;
    Ok((line, !ok))
}

struct Live {
    death: f64,
    id: usize,
}

impl PartialEq for Live {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Live {}
impl PartialOrd for Live {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Live {
    // min-heap on (death, id)
    fn cmp(&self, o: &Self) -> Ordering {
        o.death.total_cmp(&self.death).then(o.id.cmp(&self.id))
    }
}

struct Node {
    cell: ConvexPolygon,
    rng: ChaCha8Rng,
    key: Seed,
}

fn node(cell: ConvexPolygon, key: Seed, birth: f64, cfg: &DivisionConfig) -> Result<(Node, f64)> {
    let mut rng = key.rng(0, "cell");
    let rate = match cfg.lifetime {
        LifetimeRule::LStit => cfg.rose.hit_measure(&cell),
        LifetimeRule::LArea => cell.area(),
    };
    let life = if rate > 0.0 {
        Exp::new(rate).map_err(|e| Error::Numeric(e.to_string()))?.sample(&mut rng)
    } else {
        f64::INFINITY
    };
    Ok((Node { cell, rng, key }, birth + life))
}

/// Iterative cell division of the window domain.
///
/// Each cell owns a random stream derived from its split path, so a later
/// stopping time refines the tessellation obtained for an earlier one.
pub fn cell_division(w: &Window<ConvexPolygon>, cfg: &DivisionConfig, seed: Seed) -> Result<PlanarTessellation> {
    cfg.validate()?;
    let (t_stop, n_stop) = match cfg.stop {
        StopRule::Time { a } => (a, usize::MAX),
        StopRule::Cells { n } => (f64::INFINITY, n),
    };
    let mut nodes: Vec<Option<Node>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let (root, d) = node(super::planar_domain(w)?, seed.derive(0, "root"), 0.0, cfg)?;
    nodes.push(Some(root));
    heap.push(Live { death: d, id: 0 });
    let mut frozen: Vec<(usize, ConvexPolygon)> = Vec::new();
    let (mut splits, mut asa_exhausted) = (0usize, 0usize);
    let mut alive = 1usize;
    while let Some(Live { death, id }) = heap.pop() {
        if death > t_stop || alive >= n_stop {
            frozen.push((id, nodes[id].take().unwrap().cell));
            continue;
        }
        let mut nd = nodes[id].take().unwrap();
        let (line, exhausted) = choose_split(&nd.cell, cfg, &mut nd.rng)?;
        let (a, b) = nd.cell.split(&line);
        let (Some(a), Some(b)) = (a, b) else {
            // Degenerate split of a sliver: the cell keeps living with a fresh clock.
            let (n2, d2) = node(nd.cell, nd.key.derive(1, "retry"), death, cfg)?;
            nodes[id] = Some(n2);
            heap.push(Live { death: d2, id });
            continue;
        };
        if exhausted {
            asa_exhausted += 1;
        }
        splits += 1;
        alive += 1;
        if alive > MAX_CELLS {
            return Err(Error::Resource(format!("cell division exceeded {MAX_CELLS} cells")));
        }
        for (k, piece) in [(0u64, a), (1u64, b)] {
            let (child, dc) = node(piece, nd.key.derive(k, "child"), death, cfg)?;
            nodes.push(Some(child));
            heap.push(Live { death: dc, id: nodes.len() - 1 });
        }
    }
    if asa_exhausted > 0 {
        log::warn!("small-angle resampling exhausted for {asa_exhausted} splits");
    }
    frozen.sort_by_key(|(id, _)| *id);
    let cells = frozen.into_iter().map(|(_, c)| c).collect();
    let model = if cfg.lifetime == LifetimeRule::LStit && cfg.division == DivisionRule::DStit { "stit" } else { "division" };
    let mut t = PlanarTessellation::from_cells(model, w.clone(), cells);
    t.diagnostics.insert("splits".into(), splits as f64);
    t.diagnostics.insert("asa_exhausted".into(), asa_exhausted as f64);
    Ok(t)
}

/// STIT tessellation stopped at time `a`, by per-cell exponential clocks.
pub fn stit(w: &Window<ConvexPolygon>, a: f64, rose: &DirectionRose, seed: Seed) -> Result<PlanarTessellation> {
    cell_division(w, &DivisionConfig::stit(a, rose.clone()), seed)
}

/// STIT by the window-level rejection scheme: every cell draws window clocks
/// and window lines, and splits at the first line that hits it.
pub fn stit_rejection(w: &Window<ConvexPolygon>, a: f64, rose: &DirectionRose, seed: Seed) -> Result<PlanarTessellation> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Parameter(format!("stopping time must be positive, got {a}")));
    }
    rose.validate()?;
    let dom = super::planar_domain(w)?;
    let clock = Exp::new(rose.hit_measure(&dom)).map_err(|e| Error::Numeric(e.to_string()))?;
    let mut stack = vec![(dom.clone(), 0.0, seed.derive(0, "root"))];
    let mut cells = Vec::new();
    let mut splits = 0usize;
    while let Some((c, mut t, key)) = stack.pop() {
        let mut rng = key.rng(0, "reject");
        loop {
            t += clock.sample(&mut rng);
            if t > a {
                cells.push(c);
                break;
            }
            let l = sample_chord(&dom, rose, &mut rng)?;
            if let (Some(p), Some(q)) = c.split(&l) {
                splits += 1;
                if cells.len() + stack.len() + 2 > MAX_CELLS {
                    return Err(Error::Resource(format!("STIT exceeded {MAX_CELLS} cells")));
                }
                stack.push((q, t, key.derive(1, "child")));
                stack.push((p, t, key.derive(0, "child")));
                break;
            }
        }
    }
    let mut t = PlanarTessellation::from_cells("stit", w.clone(), cells);
    t.diagnostics.insert("splits".into(), splits as f64);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characteristics::ks_statistic;
    use crate::geom::{VertexKind, DEFAULT_TOL_ANGLE};
    use approx::assert_relative_eq;

    fn interior_kinds(t: &PlanarTessellation) -> Vec<Option<VertexKind>> {
        t.lattice.interior_vertices().map(|v| t.lattice.classify(v, DEFAULT_TOL_ANGLE)).collect()
    }

    #[test]
    fn tiny_time_gives_window() {
        let t = stit(&Window::unit_square(), 1e-9, &DirectionRose::Isotropic, Seed::new(1)).unwrap();
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn stit_is_t_tessellation_and_partition() {
        let t = stit(&Window::unit_square(), 20.0, &DirectionRose::Isotropic, Seed::new(3)).unwrap();
        assert!(t.len() > 10);
        assert!(t.partition_error() < 1e-12);
        let k = interior_kinds(&t);
        assert!(!k.is_empty());
        assert!(k.iter().all(|k| *k == Some(VertexKind::T)));
        assert_eq!(t.lattice.n_chains, t.diagnostics["splits"] as usize);
    }

    #[test]
    fn later_stop_refines() {
        let w = Window::unit_square();
        let coarse = stit(&w, 5.0, &DirectionRose::Isotropic, Seed::new(9)).unwrap();
        let fine = stit(&w, 12.0, &DirectionRose::Isotropic, Seed::new(9)).unwrap();
        assert!(fine.len() >= coarse.len());
        for c in &fine.cells {
            let g = c.centroid();
            let owner = coarse.cells.iter().find(|k| k.contains(g, 0.0)).unwrap();
            assert!(c.vertices().iter().all(|v| owner.contains(*v, 1e-9)));
        }
    }

    #[test]
    fn division_with_stit_rules_equals_stit() {
        let w = Window::unit_square();
        let a = stit(&w, 8.0, &DirectionRose::Isotropic, Seed::new(4)).unwrap();
        let b = cell_division(&w, &DivisionConfig::stit(8.0, DirectionRose::Isotropic), Seed::new(4)).unwrap();
        assert_eq!(a.cells, b.cells);
    }

    #[test]
    fn rejection_scheme_agrees_in_distribution() {
        let w = Window::unit_square();
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut r = 0;
        while x.len() < 1000 || y.len() < 1000 {
            let s = Seed::new(100 + r);
            x.extend(stit(&w, 6.0, &DirectionRose::Isotropic, s).unwrap().cells.iter().map(|c| c.area()));
            y.extend(stit_rejection(&w, 6.0, &DirectionRose::Isotropic, s.derive(0, "rej")).unwrap().cells.iter().map(|c| c.area()));
            r += 1;
        }
        let d = ks_statistic(&x[..1000], &y[..1000]);
        // two-sample KS critical value at level 0.001 for n = m = 1000 is about 0.087
        assert!(d < 0.087, "KS {d}");
    }

    #[test]
    fn rectangular_rose_gives_boxes() {
        let rose = DirectionRose::axis_aligned(0.5).unwrap();
        let t = stit(&Window::unit_square(), 10.0, &rose, Seed::new(2)).unwrap();
        assert!(t.cells.iter().all(|c| c.is_axis_box()));
    }

    #[test]
    fn count_stop_and_variants() {
        let w = Window::unit_square();
        for division in [DivisionRule::DStit, DivisionRule::DGauss, DivisionRule::DRdmin, DivisionRule::DRdssq] {
            for lifetime in [LifetimeRule::LStit, LifetimeRule::LArea] {
                let cfg = DivisionConfig { lifetime, division, asa_min_angle: 0.3, rose: DirectionRose::Isotropic, stop: StopRule::Cells { n: 40 } };
                let t = cell_division(&w, &cfg, Seed::new(5)).unwrap();
                assert_eq!(t.len(), 40);
                assert_relative_eq!(t.total_area(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn rdssq_halves_a_square() {
        let sq = ConvexPolygon::unit_square();
        let t = optimise_offset(&sq, Vec2 { x: 1.0, y: 0.0 }, |a, b| a * a + b * b);
        assert!((t - 0.5).abs() < 1e-6, "{t}");
    }

    #[test]
    fn asa_angle_of_diagonal_cut() {
        let sq = ConvexPolygon::unit_square();
        let l = Line::through(Vec2 { x: 0.5, y: 0.5 }, Vec2::from_angle(std::f64::consts::FRAC_PI_4)).unwrap();
        assert_relative_eq!(chord_min_angle(&sq, &l), std::f64::consts::FRAC_PI_4, epsilon = 1e-12);
    }

    #[test]
    fn config_validation() {
        let mut cfg = DivisionConfig::stit(1.0, DirectionRose::Isotropic);
        cfg.asa_min_angle = 2.0;
        assert!(cfg.validate().is_err());
        cfg.asa_min_angle = 0.0;
        cfg.stop = StopRule::Time { a: -1.0 };
        assert!(cfg.validate().is_err());
    }
}
