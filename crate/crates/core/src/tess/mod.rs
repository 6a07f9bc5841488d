//! Tessellation containers: polygonal/polyhedral cell complexes with their
//! face lattices, and raster label grids.

mod lattice2;
mod lattice3;
mod merge;
mod raster;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use lattice2::FaceLattice2;
pub use lattice3::{on_polyhedron_boundary, polygon_area_3d, FaceLattice3};
pub use merge::{BucketGrid, PointMerger};
pub use raster::{RasterStats, RasterTessellation};

use crate::geom::{
    ConvexBody, ConvexPolygon, ConvexPolyhedron, EdgeMode, Vec2, Vec3, Window, DEFAULT_TOL_ANGLE,
};
use crate::process::PointPattern;

/// Generator whose cell is empty, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmptyCell {
    pub generator: usize,
    pub reason: String,
}

/// Bounded polygonal tessellation of a planar window.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarTessellation {
    pub model: String,
    pub window: Window<ConvexPolygon>,
    /// Region covered by the cells (window, dilated window, or torus box).
    pub domain: ConvexPolygon,
    pub cells: Vec<ConvexPolygon>,
    pub cell_generator: Vec<Option<usize>>,
    pub generators: Option<PointPattern<Vec2>>,
    pub empty_cells: Vec<EmptyCell>,
    pub lattice: FaceLattice2,
    /// Model-specific numbers (split counts, convergence, flags).
    pub diagnostics: BTreeMap<String, f64>,
}

/// Region tessellated for a window under its edge treatment.
pub fn domain_of<B: ConvexBody>(w: &Window<B>) -> B {
    match w.edge_mode {
        EdgeMode::Periodic => w.shape.clone(),
        _ => w.effective_shape(),
    }
}

fn periodic_box<B: ConvexBody>(w: &Window<B>) -> Option<(B::Point, B::Point)> {
    if w.is_periodic() {
        let (lo, hi) = w.bounds();
        Some((lo, hi - lo))
    } else {
        None
    }
}

impl PlanarTessellation {
    pub fn new(
        model: impl Into<String>,
        window: Window<ConvexPolygon>,
        cells: Vec<ConvexPolygon>,
        cell_generator: Vec<Option<usize>>,
        generators: Option<PointPattern<Vec2>>,
    ) -> Self {
        let domain = domain_of(&window);
        let lattice = FaceLattice2::build(&cells, &domain, periodic_box(&window), DEFAULT_TOL_ANGLE);
        Self {
            model: model.into(),
            window,
            domain,
            cells,
            cell_generator,
            generators,
            empty_cells: Vec::new(),
            lattice,
            diagnostics: BTreeMap::new(),
        }
    }

    /// Cells without generators.
    pub fn from_cells(model: impl Into<String>, window: Window<ConvexPolygon>, cells: Vec<ConvexPolygon>) -> Self {
        let n = cells.len();
        Self::new(model, window, cells, vec![None; n], None)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_periodic(&self) -> bool {
        self.window.is_periodic()
    }

    pub fn total_area(&self) -> f64 {
        crate::characteristics::kahan_sum(self.cells.iter().map(|c| c.area()))
    }

    /// Relative deviation of the summed cell area from the domain area.
    pub fn partition_error(&self) -> f64 {
        (self.total_area() - self.domain.area()).abs() / self.domain.area()
    }

    /// No cell corner lies inside a side of another cell.
    pub fn is_face_to_face(&self) -> bool {
        !self.lattice.vertex_pi.iter().any(|p| *p)
    }

    /// Every interior vertex in exactly three cells and every interior edge in two.
    pub fn is_normal(&self) -> bool {
        let l = &self.lattice;
        l.interior_vertices().all(|v| l.vertex_cells[v].len() == 3)
            && l.interior_edges().all(|e| l.edge_cells[e].len() == 2)
            && self.is_face_to_face()
    }

    /// Index of the cell containing `origin` (lowest index on ties).
    pub fn zero_cell(&self, origin: Vec2) -> Option<usize> {
        let o = if let Some((lo, ext)) = self.lattice.periodic {
            PointMerger::new(0.0, Some((lo, ext))).wrap(origin)
        } else {
            origin
        };
        let tol = self.lattice.tol;
        let find = |p: Vec2| self.cells.iter().position(|c| c.contains(p, tol));
        if let Some(i) = find(o) {
            return Some(i);
        }
        // Periodic cells may sit on a translate of the origin.
        if let Some((_, ext)) = self.lattice.periodic {
            for dx in [-1.0, 0.0, 1.0] {
                for dy in [-1.0, 0.0, 1.0] {
                    if let Some(i) = find(o + Vec2 { x: dx * ext.x, y: dy * ext.y }) {
                        return Some(i);
                    }
                }
            }
        }
        None
    }

    /// Neighbour lists from the lattice.
    pub fn neighbors(&self) -> &[Vec<usize>] {
        &self.lattice.cell_neighbors
    }
}

/// Bounded polyhedral tessellation of a spatial window.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialTessellation {
    pub model: String,
    pub window: Window<ConvexPolyhedron>,
    pub domain: ConvexPolyhedron,
    pub cells: Vec<ConvexPolyhedron>,
    pub cell_generator: Vec<Option<usize>>,
    pub generators: Option<PointPattern<Vec3>>,
    pub empty_cells: Vec<EmptyCell>,
    pub lattice: FaceLattice3,
    pub diagnostics: BTreeMap<String, f64>,
}

impl SpatialTessellation {
    pub fn new(
        model: impl Into<String>,
        window: Window<ConvexPolyhedron>,
        cells: Vec<ConvexPolyhedron>,
        cell_generator: Vec<Option<usize>>,
        generators: Option<PointPattern<Vec3>>,
    ) -> Self {
        let domain = domain_of(&window);
        let lattice = FaceLattice3::build(&cells, &domain, periodic_box(&window));
        Self {
            model: model.into(),
            window,
            domain,
            cells,
            cell_generator,
            generators,
            empty_cells: Vec::new(),
            lattice,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn from_cells(model: impl Into<String>, window: Window<ConvexPolyhedron>, cells: Vec<ConvexPolyhedron>) -> Self {
        let n = cells.len();
        Self::new(model, window, cells, vec![None; n], None)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn total_volume(&self) -> f64 {
        crate::characteristics::kahan_sum(self.cells.iter().map(|c| c.volume()))
    }

    pub fn partition_error(&self) -> f64 {
        (self.total_volume() - self.domain.volume()).abs() / self.domain.volume()
    }

    pub fn zero_cell(&self, origin: Vec3) -> Option<usize> {
        let tol = self.lattice.tol;
        self.cells.iter().position(|c| c.contains(origin, tol))
    }
}

/// Either kind of polytopal tessellation.
#[derive(Debug, Clone, PartialEq)]
pub enum Tessellation {
    Planar(PlanarTessellation),
    Spatial(SpatialTessellation),
}

impl Tessellation {
    pub fn model(&self) -> &str {
        match self {
            Tessellation::Planar(t) => &t.model,
            Tessellation::Spatial(t) => &t.model,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Tessellation::Planar(_) => 2,
            Tessellation::Spatial(_) => 3,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Tessellation::Planar(t) => t.len(),
            Tessellation::Spatial(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl From<PlanarTessellation> for Tessellation {
    fn from(t: PlanarTessellation) -> Self {
        Tessellation::Planar(t)
    }
}

impl From<SpatialTessellation> for Tessellation {
    fn from(t: SpatialTessellation) -> Self {
        Tessellation::Spatial(t)
    }
}
