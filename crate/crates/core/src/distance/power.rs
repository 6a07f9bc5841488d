use crate::geom::{ConvexBody, Hyperplane, Side, Vector};

/// Bucket grid over sites for ring-by-ring neighbour search.
pub(crate) struct SiteGrid {
    lo: [f64; 3],
    h: f64,
    n: [i64; 3],
    dim: usize,
    buckets: Vec<Vec<usize>>,
}

impl SiteGrid {
    pub fn new<P: Vector>(sites: &[P], lo: P, hi: P) -> Self {
        let dim = P::DIM;
        let ext: Vec<f64> = (0..dim).map(|a| (hi.coord(a) - lo.coord(a)).max(1e-12)).collect();
        let vol: f64 = ext.iter().product();
        let h = (2.0 * vol / sites.len().max(1) as f64).powf(1.0 / dim as f64);
        let mut n = [1i64; 3];
        let mut l = [0.0; 3];
        for a in 0..dim {
            n[a] = ((ext[a] / h).ceil() as i64).clamp(1, 1 << 12);
            l[a] = lo.coord(a);
        }
        let mut g = Self { lo: l, h, n, dim, buckets: vec![Vec::new(); (n[0] * n[1] * n[2]) as usize] };
        for (i, s) in sites.iter().enumerate() {
            let b = g.bucket_of(*s);
            let idx = g.index(b);
            g.buckets[idx].push(i);
        }
        g
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn bucket_of<P: Vector>(&self, p: P) -> [i64; 3] {
        let mut b = [0i64; 3];
        for a in 0..self.dim {
            b[a] = (((p.coord(a) - self.lo[a]) / self.h).floor() as i64).clamp(0, self.n[a] - 1);
        }
        b
    }

    fn index(&self, b: [i64; 3]) -> usize {
        (b[0] + self.n[0] * (b[1] + self.n[1] * b[2])) as usize
    }

    /// Largest ring index that still touches the grid from `c`.
    pub fn max_ring(&self, c: [i64; 3]) -> i64 {
        (0..self.dim).map(|a| c[a].max(self.n[a] - 1 - c[a])).max().unwrap_or(0)
    }

    /// Site ids in buckets at Chebyshev distance exactly `k` from bucket `c`.
    pub fn ring(&self, c: [i64; 3], k: i64, out: &mut Vec<usize>) {
        out.clear();
        let rng = |a: usize| if a < self.dim { (c[a] - k).max(0)..=(c[a] + k).min(self.n[a] - 1) } else { 0..=0 };
        for z in rng(2) {
            for y in rng(1) {
                for x in rng(0) {
                    let d = (x - c[0]).abs().max((y - c[1]).abs()).max((z - c[2]).abs());
                    if d != k {
                        continue;
                    }
                    out.extend_from_slice(&self.buckets[self.index([x, y, z])]);
                }
            }
        }
    }
}

/// Outcome of clipping a domain to one power cell.
pub(crate) enum PowerCell<B> {
    Cell(B),
    Empty,
}

/// Power cells `{y : |y-x_i|^2 - w_i <= |y-x_j|^2 - w_j for all j}` intersected with
/// `domain`, computed by half-space clipping against candidates found ring by ring.
pub(crate) fn power_cells<B: ConvexBody>(
    sites: &[B::Point],
    weights: &[f64],
    targets: &[usize],
    domain: &B,
) -> Vec<PowerCell<B>> {
    let (lo, hi) = domain.bounds();
    let (mut slo, mut shi) = (lo, hi);
    let d = B::Point::DIM;
    for s in sites {
        let mut a = slo.coords();
        let mut b = shi.coords();
        for k in 0..d {
            a[k] = a[k].min(s.coord(k));
            b[k] = b[k].max(s.coord(k));
        }
        slo = B::Point::from_coords(&a);
        shi = B::Point::from_coords(&b);
    }
    let grid = SiteGrid::new(sites, slo, shi);
    let w_max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut ring = Vec::new();
    let mut out = Vec::with_capacity(targets.len());
    for &i in targets {
        let xi = sites[i];
        let wi = weights[i];
        let c = grid.bucket_of(xi);
        let kmax = grid.max_ring(c);
        let mut cell = Some(domain.clone());
        let mut k = 0;
        loop {
            grid.ring(c, k, &mut ring);
            for &j in &ring {
                if j == i {
                    continue;
                }
                let Some(cur) = cell.as_ref() else { break };
                let xj = sites[j];
                let diff = xj - xi;
                let dist = diff.norm();
                if dist == 0.0 {
                    continue;
                }
                let u = diff * (1.0 / dist);
                let offset = ((xj.norm2() - xi.norm2()) + (wi - weights[j])) / (2.0 * dist);
                let h = Hyperplane { normal: u, offset };
                let corners = cur.corner_points();
                let scale = corners.iter().map(|p| p.norm()).fold(1.0, f64::max);
                if corners.iter().all(|p| h.signed_distance(*p) <= 1e-12 * scale) {
                    continue;
                }
                cell = cur.clip_halfspace(&h, Side::Below);
            }
            let Some(cur) = cell.as_ref() else { break };
            if k >= kmax {
                break;
            }
            let r = cur.corner_points().iter().map(|p| p.dist(xi)).fold(0.0, f64::max);
            let reach = r + (r * r - wi + w_max).max(0.0).sqrt();
            if k as f64 * grid.spacing() >= reach {
                break;
            }
            k += 1;
        }
        out.push(match cell {
            Some(b) => PowerCell::Cell(b),
            None => PowerCell::Empty,
        });
    }
    out
}
