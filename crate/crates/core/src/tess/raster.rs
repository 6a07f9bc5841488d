use serde::{Deserialize, Serialize};

use crate::geom::Vec2;
use crate::process::PointPattern;

/// Label grid over an axis-aligned box. Row 0 is the lowest `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterTessellation {
    pub model: String,
    pub lo: Vec2,
    pub hi: Vec2,
    /// Pixels per axis.
    pub resolution: usize,
    pub labels: Vec<u32>,
    /// Number of possible labels (generators or leaves).
    pub n_labels: usize,
    pub generators: Option<PointPattern<Vec2>>,
}

/// Per-label summaries of a raster tessellation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterStats {
    pub pixel_area: f64,
    pub areas: Vec<f64>,
    pub neighbors: Vec<Vec<u32>>,
    pub components: Vec<usize>,
    /// Label transitions between horizontal, vertical and the two diagonal neighbours.
    pub transitions: [u64; 4],
    /// Cauchy–Crofton estimate of total interior boundary length.
    pub boundary_length: f64,
}

impl RasterStats {
    pub fn present(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.areas.len()).filter(|&i| self.areas[i] > 0.0)
    }

    pub fn n_cells(&self) -> usize {
        self.present().count()
    }

    pub fn mean_neighbors(&self) -> f64 {
        let n = self.n_cells();
        if n == 0 {
            return 0.0;
        }
        self.present().map(|i| self.neighbors[i].len() as f64).sum::<f64>() / n as f64
    }
}

impl RasterTessellation {
    pub fn pixel_size(&self) -> (f64, f64) {
        let n = self.resolution as f64;
        ((self.hi.x - self.lo.x) / n, (self.hi.y - self.lo.y) / n)
    }

    pub fn pixel_center(&self, i: usize, j: usize) -> Vec2 {
        let (hx, hy) = self.pixel_size();
        Vec2 { x: self.lo.x + (i as f64 + 0.5) * hx, y: self.lo.y + (j as f64 + 0.5) * hy }
    }

    pub fn label(&self, i: usize, j: usize) -> u32 {
        self.labels[j * self.resolution + i]
    }

    pub fn window_area(&self) -> f64 {
        (self.hi.x - self.lo.x) * (self.hi.y - self.lo.y)
    }

    /// Areas, 4-neighbourhood adjacency and connected components per label.
    pub fn stats(&self) -> RasterStats {
        let n = self.resolution;
        let (hx, hy) = self.pixel_size();
        let pixel_area = hx * hy;
        let nl = self.n_labels.max(self.labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0));
        let mut counts = vec![0u64; nl];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); nl];
        let mut transitions = [0u64; 4];
        let link = |a: u32, b: u32, neighbors: &mut Vec<Vec<u32>>| {
            if !neighbors[a as usize].contains(&b) {
                neighbors[a as usize].push(b);
                neighbors[b as usize].push(a);
            }
        };
        for j in 0..n {
            for i in 0..n {
                let l = self.label(i, j);
                if i + 1 < n && self.label(i + 1, j) != l {
                    transitions[0] += 1;
                    link(l, self.label(i + 1, j), &mut neighbors);
                }
                if j + 1 < n && self.label(i, j + 1) != l {
                    transitions[1] += 1;
                    link(l, self.label(i, j + 1), &mut neighbors);
                }
                if i + 1 < n && j + 1 < n && self.label(i + 1, j + 1) != l {
                    transitions[2] += 1;
                }
                if i > 0 && j + 1 < n && self.label(i - 1, j + 1) != l {
                    transitions[3] += 1;
                }
            }
        }
        for nb in neighbors.iter_mut() {
            nb.sort_unstable();
        }

        // Flood fill for 4-connected components.
        let mut comp = vec![false; n * n];
        let mut components = vec![0usize; nl];
        let mut stack = Vec::new();
        for start in 0..n * n {
            if comp[start] {
                continue;
            }
            let l = self.labels[start];
            components[l as usize] += 1;
            comp[start] = true;
            stack.push(start);
            while let Some(p) = stack.pop() {
                let (i, j) = (p % n, p / n);
                let mut visit = |q: usize| {
                    if !comp[q] && self.labels[q] == l {
                        comp[q] = true;
                        stack.push(q);
                    }
                };
                if i > 0 {
                    visit(p - 1);
                }
                if i + 1 < n {
                    visit(p + 1);
                }
                if j > 0 {
                    visit(p - n);
                }
                if j + 1 < n {
                    visit(p + n);
                }
            }
        }

        let hd = (hx * hy).sqrt() / std::f64::consts::SQRT_2;
        let boundary_length = std::f64::consts::PI / 8.0
            * (hy * transitions[0] as f64 + hx * transitions[1] as f64 + hd * (transitions[2] + transitions[3]) as f64);
        RasterStats {
            pixel_area,
            areas: counts.iter().map(|&c| c as f64 * pixel_area).collect(),
            neighbors,
            components,
            transitions,
            boundary_length,
        }
    }
}
