use std::collections::HashMap;

use crate::geom::Vector;

/// Deduplicates points within `tol`, optionally on a flat torus.
#[derive(Debug, Clone)]
pub struct PointMerger<P: Vector> {
    tol: f64,
    cell: f64,
    period: Option<(P, P)>,
    grid_n: [i64; 3],
    map: HashMap<[i64; 3], Vec<usize>>,
    points: Vec<P>,
}

impl<P: Vector> PointMerger<P> {
    /// `period = Some((lo, extent))` identifies opposite faces of the box.
    pub fn new(tol: f64, period: Option<(P, P)>) -> Self {
        let cell = (tol * 16.0).max(1e-300);
        let mut grid_n = [1i64; 3];
        if let Some((_, ext)) = period {
            for (a, g) in grid_n.iter_mut().enumerate().take(P::DIM) {
                *g = ((ext.coord(a) / cell).floor() as i64).max(1);
            }
        }
        Self { tol, cell, period, grid_n, map: HashMap::new(), points: Vec::new() }
    }

    pub fn wrap(&self, p: P) -> P {
        match self.period {
            None => p,
            Some((lo, ext)) => {
                let c: Vec<f64> = (0..P::DIM)
                    .map(|a| {
                        let (l, e) = (lo.coord(a), ext.coord(a));
                        let mut x = l + (p.coord(a) - l).rem_euclid(e);
                        if x >= l + e {
                            x = l;
                        }
                        x
                    })
                    .collect();
                P::from_coords(&c)
            }
        }
    }

    /// Difference `a - b` (minimal image on the torus).
    pub fn delta(&self, a: P, b: P) -> P {
        let d = a - b;
        match self.period {
            None => d,
            Some((_, ext)) => {
                let c: Vec<f64> = (0..P::DIM)
                    .map(|k| {
                        let e = ext.coord(k);
                        let x = d.coord(k);
                        x - e * (x / e).round()
                    })
                    .collect();
                P::from_coords(&c)
            }
        }
    }

    fn key(&self, p: P) -> [i64; 3] {
        let mut k = [0i64; 3];
        for (a, slot) in k.iter_mut().enumerate().take(P::DIM) {
            let base = self.period.map_or(0.0, |(lo, _)| lo.coord(a));
            let mut v = ((p.coord(a) - base) / self.cell).floor() as i64;
            if self.period.is_some() {
                v = v.clamp(0, self.grid_n[a] - 1);
            }
            *slot = v;
        }
        k
    }

    fn neighbours(&self, k: [i64; 3]) -> Vec<[i64; 3]> {
        let mut out = Vec::with_capacity(27);
        let r = |a: usize| if a < P::DIM { -1..=1 } else { 0..=0 };
        for dx in r(0) {
            for dy in r(1) {
                for dz in r(2) {
                    let mut n = [k[0] + dx, k[1] + dy, k[2] + dz];
                    if self.period.is_some() {
                        for a in 0..P::DIM {
                            n[a] = n[a].rem_euclid(self.grid_n[a]);
                        }
                    }
                    if !out.contains(&n) {
                        out.push(n);
                    }
                }
            }
        }
        out
    }

    pub fn find(&self, p: P) -> Option<usize> {
        let p = self.wrap(p);
        let k = self.key(p);
        let tol2 = self.tol * self.tol;
        for n in self.neighbours(k) {
            if let Some(ids) = self.map.get(&n) {
                for &i in ids {
                    if self.delta(self.points[i], p).norm2() <= tol2 {
                        return Some(i);
                    }
                }
            }
        }
        None
    }

    /// Returns the id of an existing point within `tol`, or inserts `p`.
    pub fn insert(&mut self, p: P) -> usize {
        if let Some(i) = self.find(p) {
            return i;
        }
        let p = self.wrap(p);
        let id = self.points.len();
        self.points.push(p);
        self.map.entry(self.key(p)).or_default().push(id);
        id
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn into_points(self) -> Vec<P> {
        self.points
    }
}

/// Uniform bucket grid over a box for range queries on points.
#[derive(Debug, Clone)]
pub struct BucketGrid {
    lo: [f64; 2],
    h: f64,
    n: [usize; 2],
    buckets: Vec<Vec<usize>>,
}

impl BucketGrid {
    pub fn new(points: &[crate::geom::Vec2], lo: crate::geom::Vec2, hi: crate::geom::Vec2) -> Self {
        let ext = [(hi.x - lo.x).max(1e-12), (hi.y - lo.y).max(1e-12)];
        let h = (ext[0] * ext[1] / points.len().max(1) as f64).sqrt().max(1e-9);
        let n = [((ext[0] / h).ceil() as usize).clamp(1, 4096), ((ext[1] / h).ceil() as usize).clamp(1, 4096)];
        let mut g = Self { lo: [lo.x, lo.y], h, n, buckets: vec![Vec::new(); n[0] * n[1]] };
        for (i, p) in points.iter().enumerate() {
            let (x, y) = g.cell_of(p.x, p.y);
            g.buckets[y * n[0] + x].push(i);
        }
        g
    }

    fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let cx = ((x - self.lo[0]) / self.h).floor().clamp(0.0, (self.n[0] - 1) as f64) as usize;
        let cy = ((y - self.lo[1]) / self.h).floor().clamp(0.0, (self.n[1] - 1) as f64) as usize;
        (cx, cy)
    }

    /// Candidate ids in buckets overlapping the box `[lo, hi]`.
    pub fn query(&self, lo: crate::geom::Vec2, hi: crate::geom::Vec2, out: &mut Vec<usize>) {
        out.clear();
        let (x0, y0) = self.cell_of(lo.x, lo.y);
        let (x1, y1) = self.cell_of(hi.x, hi.y);
        for y in y0..=y1 {
            for x in x0..=x1 {
                out.extend_from_slice(&self.buckets[y * self.n[0] + x]);
            }
        }
    }
}
