use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::division::{DeadLeaves, Leaf};
use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, ConvexPolyhedron, Vec2, Vec3, Window};
use crate::models::Realization;
use crate::process::PointPattern;
use crate::tess::{EmptyCell, PlanarTessellation, RasterTessellation, SpatialTessellation, Tessellation};

pub const SCHEMA_VERSION: u32 = 1;

/// Provenance stored alongside the geometry.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Generator<P> {
    index: usize,
    coords: P,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    marks: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Cell2 {
    id: usize,
    vertex_ring: Vec<usize>,
    #[serde(default)]
    generator: Option<Generator<[f64; 2]>>,
    neighbors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Cell3 {
    id: usize,
    /// Global indices of the cell's vertices; facet loops index into this list.
    vertices: Vec<usize>,
    facet_loops: Vec<Vec<usize>>,
    #[serde(default)]
    generator: Option<Generator<[f64; 3]>>,
    neighbors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Body {
    Planar {
        window: Window<ConvexPolygon>,
        vertices: Vec<[f64; 2]>,
        edges: Vec<[usize; 2]>,
        cells: Vec<Cell2>,
        #[serde(default)]
        generators: Option<PointPattern<Vec2>>,
        #[serde(default)]
        empty_cells: Vec<EmptyCell>,
        #[serde(default)]
        diagnostics: BTreeMap<String, f64>,
    },
    Spatial {
        window: Window<ConvexPolyhedron>,
        vertices: Vec<[f64; 3]>,
        edges: Vec<[usize; 2]>,
        cells: Vec<Cell3>,
        #[serde(default)]
        generators: Option<PointPattern<Vec3>>,
        #[serde(default)]
        empty_cells: Vec<EmptyCell>,
        #[serde(default)]
        diagnostics: BTreeMap<String, f64>,
    },
    Raster {
        resolution: usize,
        lo: [f64; 2],
        hi: [f64; 2],
        /// Row-major runs `[label, count]`, row 0 at the lowest `y`.
        labels: Vec<[u32; 2]>,
        n_labels: usize,
        #[serde(default)]
        generators: Option<PointPattern<Vec2>>,
        /// Present for dead-leaves realizations.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        leaves: Option<Vec<Leaf>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        drawn: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Document {
    schema_version: u32,
    model: String,
    #[serde(default)]
    params: Value,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(flatten)]
    body: Body,
}

/// Exact-bit vertex pool.
struct Pool<const D: usize> {
    index: HashMap<[u64; D], usize>,
    points: Vec<[f64; D]>,
}

impl<const D: usize> Pool<D> {
    fn new() -> Self {
        Self { index: HashMap::new(), points: Vec::new() }
    }

    fn id(&mut self, p: [f64; D]) -> usize {
        let key = p.map(f64::to_bits);
        *self.index.entry(key).or_insert_with(|| {
            self.points.push(p);
            self.points.len() - 1
        })
    }
}

fn sorted_edge(a: usize, b: usize) -> [usize; 2] {
    [a.min(b), a.max(b)]
}

fn marks_of<P>(g: &PointPattern<P>, i: usize) -> BTreeMap<String, Value> {
    let m = &g.marks;
    let mut out = BTreeMap::new();
    for (name, v) in [("radius", &m.radius), ("weight", &m.weight), ("time", &m.time)] {
        if let Some(v) = v {
            out.insert(name.to_string(), Value::from(v[i]));
        }
    }
    if let Some(v) = &m.matrix {
        out.insert("matrix".into(), Value::from(v[i].clone()));
    }
    out
}

fn rle(labels: &[u32]) -> Vec<[u32; 2]> {
    let mut runs: Vec<[u32; 2]> = Vec::new();
    for &l in labels {
        match runs.last_mut() {
            Some(r) if r[0] == l && r[1] < u32::MAX => r[1] += 1,
            _ => runs.push([l, 1]),
        }
    }
    runs
}

fn unrle(runs: &[[u32; 2]], n: usize) -> Result<Vec<u32>> {
    let total: usize = runs.iter().map(|r| r[1] as usize).sum();
    if total != n {
        return Err(Error::Format(format!("label runs cover {total} pixels, expected {n}")));
    }
    Ok(runs.iter().flat_map(|r| std::iter::repeat_n(r[0], r[1] as usize)).collect())
}

fn planar_body(t: &PlanarTessellation) -> Body {
    let mut pool = Pool::<2>::new();
    let mut edges = Vec::new();
    let cells = t
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let ring: Vec<usize> = c.vertices().iter().map(|v| pool.id([v.x, v.y])).collect();
            for k in 0..ring.len() {
                edges.push(sorted_edge(ring[k], ring[(k + 1) % ring.len()]));
            }
            let generator = match (t.cell_generator[i], &t.generators) {
                (Some(g), Some(gp)) => Some(Generator { index: g, coords: [gp.points[g].x, gp.points[g].y], marks: marks_of(gp, g) }),
                _ => None,
            };
            Cell2 { id: i, vertex_ring: ring, generator, neighbors: t.lattice.cell_neighbors[i].clone() }
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Body::Planar {
        window: t.window.clone(),
        vertices: pool.points,
        edges,
        cells,
        generators: t.generators.clone(),
        empty_cells: t.empty_cells.clone(),
        diagnostics: t.diagnostics.clone(),
    }
}

fn spatial_body(t: &SpatialTessellation) -> Body {
    let mut pool = Pool::<3>::new();
    let mut edges = Vec::new();
    let l = &t.lattice;
    let mut neighbors = vec![Vec::new(); t.cells.len()];
    for fc in &l.facet_cells {
        for &a in fc {
            for &b in fc {
                if a != b && !neighbors[a].contains(&b) {
                    neighbors[a].push(b);
                }
            }
        }
    }
    for n in &mut neighbors {
        n.sort_unstable();
    }
    let cells = t
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let vs: Vec<usize> = c.vertices().iter().map(|v| pool.id([v.x, v.y, v.z])).collect();
            for f in c.faces() {
                for k in 0..f.len() {
                    edges.push(sorted_edge(vs[f[k]], vs[f[(k + 1) % f.len()]]));
                }
            }
            let generator = match (t.cell_generator[i], &t.generators) {
                (Some(g), Some(gp)) => {
                    let p = gp.points[g];
                    Some(Generator { index: g, coords: [p.x, p.y, p.z], marks: marks_of(gp, g) })
                }
                _ => None,
            };
            Cell3 { id: i, vertices: vs, facet_loops: c.faces().to_vec(), generator, neighbors: std::mem::take(&mut neighbors[i]) }
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Body::Spatial {
        window: t.window.clone(),
        vertices: pool.points,
        edges,
        cells,
        generators: t.generators.clone(),
        empty_cells: t.empty_cells.clone(),
        diagnostics: t.diagnostics.clone(),
    }
}

fn raster_body(r: &RasterTessellation, leaves: Option<(&[Leaf], usize)>) -> Body {
    Body::Raster {
        resolution: r.resolution,
        lo: [r.lo.x, r.lo.y],
        hi: [r.hi.x, r.hi.y],
        labels: rle(&r.labels),
        n_labels: r.n_labels,
        generators: r.generators.clone(),
        leaves: leaves.map(|l| l.0.to_vec()),
        drawn: leaves.map(|l| l.1),
    }
}

/// JSON document for a realization.
pub fn export_json(r: &Realization, meta: &Meta) -> Result<String> {
    let (model, body) = match r {
        Realization::Tessellation(Tessellation::Planar(t)) => (t.model.clone(), planar_body(t)),
        Realization::Tessellation(Tessellation::Spatial(t)) => (t.model.clone(), spatial_body(t)),
        Realization::Raster(rt) => (rt.model.clone(), raster_body(rt, None)),
        Realization::Leaves(d) => (d.raster.model.clone(), raster_body(&d.raster, Some((&d.leaves, d.drawn)))),
    };
    let doc = Document { schema_version: SCHEMA_VERSION, model, params: meta.params.clone(), seed: meta.seed, body };
    let mut s = serde_json::to_string(&doc)?;
    s.push('\n');
    Ok(s)
}

fn lookup<T: Copy>(pts: &[T], i: usize) -> Result<T> {
    pts.get(i).copied().ok_or_else(|| Error::Format(format!("vertex index {i} out of range")))
}

fn cell_generators(gens: &[Option<usize>], n_gen: Option<usize>) -> Result<Vec<Option<usize>>> {
    for g in gens.iter().flatten() {
        if n_gen.is_none_or(|n| *g >= n) {
            return Err(Error::Format(format!("cell refers to missing generator {g}")));
        }
    }
    Ok(gens.to_vec())
}

/// Realization and provenance from a JSON document.
pub fn import_json(s: &str) -> Result<(Realization, Meta)> {
    let v: Value = serde_json::from_str(s)?;
    match v.get("schema_version").and_then(Value::as_u64) {
        Some(x) if x == SCHEMA_VERSION as u64 => {}
        Some(x) => return Err(Error::Format(format!("schema_version {x} is not supported (expected {SCHEMA_VERSION})"))),
        None => return Err(Error::Format("missing schema_version".into())),
    }
    let doc: Document = serde_json::from_value(v).map_err(|e| Error::Format(e.to_string()))?;
    let meta = Meta { params: doc.params, seed: doc.seed };
    let r = match doc.body {
        Body::Planar { window, vertices, cells, generators, empty_cells, diagnostics, .. } => {
            let mut polys = Vec::with_capacity(cells.len());
            for (k, c) in cells.iter().enumerate() {
                if c.id != k {
                    return Err(Error::Format(format!("cell ids must be 0..n in order, found {} at {k}", c.id)));
                }
                let ring = c.vertex_ring.iter().map(|&i| lookup(&vertices, i).map(|p| Vec2 { x: p[0], y: p[1] })).collect::<Result<Vec<_>>>()?;
                if ring.len() < 3 || ring.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
                    return Err(Error::Format(format!("cell {k} is not a polygon")));
                }
                let poly = ConvexPolygon::from_ccw_unchecked(ring);
                if !(poly.area() > 0.0) {
                    return Err(Error::Format(format!("cell {k} is not counterclockwise")));
                }
                polys.push(poly);
            }
            let gens: Vec<Option<usize>> = cells.iter().map(|c| c.generator.as_ref().map(|g| g.index)).collect();
            let gens = cell_generators(&gens, generators.as_ref().map(|g| g.len()))?;
            let window = Window::new(window.shape, window.edge_mode)?;
            let mut t = PlanarTessellation::new(doc.model, window, polys, gens, generators);
            t.empty_cells = empty_cells;
            t.diagnostics = diagnostics;
            Realization::Tessellation(Tessellation::Planar(t))
        }
        Body::Spatial { window, vertices, cells, generators, empty_cells, diagnostics, .. } => {
            let mut polys = Vec::with_capacity(cells.len());
            for (k, c) in cells.iter().enumerate() {
                if c.id != k {
                    return Err(Error::Format(format!("cell ids must be 0..n in order, found {} at {k}", c.id)));
                }
                let vs = c.vertices.iter().map(|&i| lookup(&vertices, i).map(|p| Vec3 { x: p[0], y: p[1], z: p[2] })).collect::<Result<Vec<_>>>()?;
                polys.push(ConvexPolyhedron::new(vs, c.facet_loops.clone()).map_err(|e| Error::Format(format!("cell {k}: {e}")))?);
            }
            let gens: Vec<Option<usize>> = cells.iter().map(|c| c.generator.as_ref().map(|g| g.index)).collect();
            let gens = cell_generators(&gens, generators.as_ref().map(|g| g.len()))?;
            let window = Window::new(window.shape, window.edge_mode)?;
            let mut t = SpatialTessellation::new(doc.model, window, polys, gens, generators);
            t.empty_cells = empty_cells;
            t.diagnostics = diagnostics;
            Realization::Tessellation(Tessellation::Spatial(t))
        }
        Body::Raster { resolution, lo, hi, labels, n_labels, generators, leaves, drawn } => {
            let labels = unrle(&labels, resolution * resolution)?;
            if labels.iter().any(|&l| l as usize >= n_labels) {
                return Err(Error::Format("raster label out of range".into()));
            }
            let raster = RasterTessellation {
                model: doc.model,
                lo: Vec2 { x: lo[0], y: lo[1] },
                hi: Vec2 { x: hi[0], y: hi[1] },
                resolution,
                labels,
                n_labels,
                generators,
            };
            match leaves {
                Some(leaves) => Realization::Leaves(DeadLeaves { raster, leaves, drawn: drawn.unwrap_or(0) }),
                None => Realization::Raster(raster),
            }
        }
    };
    Ok((r, meta))
}

pub fn write_document(path: &Path, r: &Realization, meta: &Meta) -> Result<()> {
    std::fs::write(path, export_json(r, meta)?)?;
    Ok(())
}

pub fn read_document(path: &Path) -> Result<(Realization, Meta)> {
    import_json(&std::fs::read_to_string(path)?)
}
