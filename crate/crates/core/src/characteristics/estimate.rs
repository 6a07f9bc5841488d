use serde::{Deserialize, Serialize};

use super::report::Report;
use super::stats::kahan_sum;
use crate::error::{Error, Result};
use crate::geom::{
    CentroidRule, ConvexBody, ConvexPolygon, ConvexPolyhedron, EdgeMode, Hyperplane, Side, Vec2, Vec3, Vector, VertexKind,
    Window, DEFAULT_TOL_ANGLE,
};
use crate::tess::{polygon_area_3d, PlanarTessellation, RasterTessellation, SpatialTessellation, Tessellation};

/// Linear fraction of the window used as reference set without edge correction.
pub const DEFAULT_INTERIOR_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    #[serde(default)]
    pub centroid: CentroidRule,
    #[serde(default = "default_fraction")]
    pub interior_fraction: f64,
}

fn default_fraction() -> f64 {
    DEFAULT_INTERIOR_FRACTION
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self { centroid: CentroidRule::GravityCenter, interior_fraction: DEFAULT_INTERIOR_FRACTION }
    }
}

/// Bodies that can be written as an intersection of half-spaces.
pub trait Facets: ConvexBody {
    /// Half-spaces `<x, u> <= r` with outward normals.
    fn halfspaces(&self) -> Vec<Hyperplane<Self::Point>>;
}

impl Facets for ConvexPolygon {
    fn halfspaces(&self) -> Vec<Hyperplane<Vec2>> {
        self.edges().filter_map(|(a, b)| Hyperplane::through(a, -(b - a).perp()).ok()).collect()
    }
}

impl Facets for ConvexPolyhedron {
    fn halfspaces(&self) -> Vec<Hyperplane<Vec3>> {
        (0..self.faces().len())
            .filter_map(|f| Hyperplane::through(self.vertices()[self.faces()[f][0]], self.face_normal(f)).ok())
            .collect()
    }
}

/// Region in which faces are counted and contents measured.
#[derive(Debug, Clone)]
pub struct Reference<P> {
    /// `None` on the torus: everything counts.
    halfspaces: Option<Vec<Hyperplane<P>>>,
    boxed: Option<(P, P)>,
    pub content: f64,
}

impl<P: Vector> Reference<P> {
    /// Torus: all faces, window content. Plus sampling: the window. Otherwise a central box.
    pub fn of<B: Facets<Point = P>>(w: &Window<B>, fraction: f64) -> Self {
        match w.edge_mode {
            EdgeMode::Periodic => Self { halfspaces: None, boxed: None, content: w.content() },
            EdgeMode::Plus { .. } => Self {
                halfspaces: Some(w.shape.halfspaces()),
                boxed: w.shape.is_axis_box().then(|| w.shape.bounds()),
                content: w.content(),
            },
            EdgeMode::None => {
                let r = w.shrunk_box(fraction);
                Self { halfspaces: Some(r.halfspaces()), boxed: Some(r.bounds()), content: r.content() }
            }
        }
    }

    pub fn is_everything(&self) -> bool {
        self.halfspaces.is_none()
    }

    /// Membership; boxes are half-open so that shifted copies tile without double counting.
    pub fn contains(&self, p: P) -> bool {
        match (&self.halfspaces, &self.boxed) {
            (None, _) => true,
            (_, Some((lo, hi))) => (0..P::DIM).all(|a| lo.coord(a) <= p.coord(a) && p.coord(a) < hi.coord(a)),
            (Some(hs), None) => hs.iter().all(|h| h.signed_distance(p) <= 0.0),
        }
    }

    /// Length of the part of segment `ab` inside the region.
    pub fn segment_length(&self, a: P, b: P) -> f64 {
        let len = a.dist(b);
        let Some(hs) = &self.halfspaces else { return len };
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for h in hs {
            let (da, db) = (h.signed_distance(a), h.signed_distance(b));
            if da > 0.0 && db > 0.0 {
                return 0.0;
            }
            if da > 0.0 {
                t0 = t0.max(da / (da - db));
            } else if db > 0.0 {
                t1 = t1.min(da / (da - db));
            }
        }
        (t1 - t0).max(0.0) * len
    }

    pub fn clip<B: ConvexBody<Point = P>>(&self, b: &B) -> Option<B> {
        let Some(hs) = &self.halfspaces else { return Some(b.clone()) };
        hs.iter().try_fold(b.clone(), |c, h| c.clip_halfspace(h, Side::Below))
    }

    /// Planar polygon (given by its corners) clipped to the region.
    pub fn clip_points(&self, pts: &[P]) -> Vec<P> {
        let Some(hs) = &self.halfspaces else { return pts.to_vec() };
        let mut cur = pts.to_vec();
        for h in hs {
            if cur.is_empty() {
                break;
            }
            let mut out = Vec::with_capacity(cur.len() + 2);
            for i in 0..cur.len() {
                let (a, b) = (cur[i], cur[(i + 1) % cur.len()]);
                let (da, db) = (h.signed_distance(a), h.signed_distance(b));
                if da <= 0.0 {
                    out.push(a);
                }
                if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
                    out.push(a + (b - a) * (da / (da - db)));
                }
            }
            cur = out;
        }
        cur
    }
}

/// Weighted average with compensated sums.
fn wmean(items: &[(f64, f64)]) -> f64 {
    let w = kahan_sum(items.iter().map(|x| x.1));
    kahan_sum(items.iter().map(|x| x.0 * x.1)) / w
}

/// Cells used for typical-cell means, with weights.
///
/// Torus: every cell. Plus sampling: cells with reference point in the window.
/// Otherwise, in a box window, cells clear of the boundary weighted by the
/// inverse content of the window eroded by their bounding box; when no such
/// cell exists (or the window is not a box), cells with reference point in
/// the central box. The flag tells whether the weighted rule was used; the
/// weights then sum to an unbiased estimate of the cell intensity.
fn typical_cells<B: ConvexBody>(
    cells: &[B],
    domain: &B,
    w: &Window<B>,
    reference: &Reference<B::Point>,
    point: impl Fn(&B) -> B::Point,
    tol: f64,
) -> (Vec<(usize, f64)>, bool) {
    let counted = || -> Vec<(usize, f64)> { (0..cells.len()).filter(|&i| reference.contains(point(&cells[i]))).map(|i| (i, 1.0)).collect() };
    match w.edge_mode {
        EdgeMode::Periodic => ((0..cells.len()).map(|i| (i, 1.0)).collect(), false),
        EdgeMode::Plus { .. } => (counted(), false),
        EdgeMode::None => {
            if !domain.is_axis_box() {
                return (counted(), false);
            }
            let (lo, hi) = domain.bounds();
            let d = <B::Point as Vector>::DIM;
            let picked: Vec<(usize, f64)> = cells
                .iter()
                .enumerate()
                .filter_map(|(i, c)| {
                    let (clo, chi) = c.bounds();
                    let clear = (0..d).all(|a| clo.coord(a) > lo.coord(a) + tol && chi.coord(a) < hi.coord(a) - tol);
                    if !clear {
                        return None;
                    }
                    let room: f64 = (0..d).map(|a| (hi.coord(a) - lo.coord(a)) - (chi.coord(a) - clo.coord(a))).product();
                    (room > 0.0).then(|| (i, 1.0 / room))
                })
                .collect();
            if picked.is_empty() {
                (counted(), false)
            } else {
                (picked, true)
            }
        }
    }
}

/// K-, J- and I-segment counts and the π-vertex proportion of a planar tessellation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segments {
    pub k: usize,
    pub j: usize,
    pub i: usize,
    pub phi: f64,
}

pub fn segment_decomposition(t: &PlanarTessellation) -> Segments {
    let l = &t.lattice;
    let interior: Vec<usize> = l.interior_vertices().collect();
    let pi = interior.iter().filter(|&&v| l.vertex_pi[v]).count();
    Segments {
        k: l.interior_edges().count(),
        j: l.sides.len(),
        i: l.n_chains,
        phi: if interior.is_empty() { 0.0 } else { pi as f64 / interior.len() as f64 },
    }
}

pub fn estimate(t: &Tessellation, rule: &CentroidRule) -> Result<Report> {
    let opts = EstimateOptions { centroid: rule.clone(), ..Default::default() };
    match t {
        Tessellation::Planar(p) => estimate_planar(p, &opts),
        Tessellation::Spatial(s) => estimate_spatial(s, &opts),
    }
}

fn insufficient(what: &str) -> Error {
    Error::InsufficientSample(format!("no {what} in the reference set"))
}

/// Face intensities, densities, typical-cell and vertex summaries of a planar tessellation.
pub fn estimate_planar(t: &PlanarTessellation, opts: &EstimateOptions) -> Result<Report> {
    let l = &t.lattice;
    let r = Reference::of(&t.window, opts.interior_fraction);
    let area = r.content;
    let verts: Vec<usize> = l.interior_vertices().filter(|&v| r.contains(l.vertices[v])).collect();
    let edges: Vec<usize> = l
        .interior_edges()
        .filter(|&e| {
            let (a, b) = l.edge_segment[e];
            r.contains((a + b) * 0.5)
        })
        .collect();
    let n_cells = t.cells.iter().filter(|c| r.contains(opts.centroid.polygon(c))).count();
    if n_cells == 0 {
        return Err(insufficient("cells"));
    }
    let mut rep = Report::single(2);
    let g0 = verts.len() as f64 / area;
    let g1 = edges.len() as f64 / area;
    let g2 = n_cells as f64 / area;
    rep.set("gamma0", g0);
    rep.set("gamma1", g1);
    rep.set("gamma2", g2);
    rep.set("mu0", g0);
    let mu1 = kahan_sum(l.interior_edges().map(|e| {
        let (a, b) = l.edge_segment[e];
        r.segment_length(a, b)
    })) / area;
    rep.set("mu1", mu1);
    let mu2 = kahan_sum(t.cells.iter().map(|c| r.clip(c).map_or(0.0, |k| k.area()))) / area;
    rep.set("mu2", mu2);
    if g1 > 0.0 {
        rep.set_mean("L1", mu1 / g1, edges.len() as f64);
    }
    rep.set("n_cells", n_cells as f64);

    let (typ, weighted) = typical_cells(&t.cells, &t.domain, &t.window, &r, |c| opts.centroid.polygon(c), l.tol);
    if typ.is_empty() {
        return Err(insufficient("typical cells"));
    }
    let tw = kahan_sum(typ.iter().map(|t| t.1));
    if weighted {
        rep.set("gamma2_ml", tw);
    }
    let mean = |f: &dyn Fn(usize) -> f64| wmean(&typ.iter().map(|&(i, w)| (f(i), w)).collect::<Vec<_>>());
    rep.set_mean("A2", mean(&|i| t.cells[i].area()), tw);
    rep.set_mean("P2", mean(&|i| t.cells[i].perimeter()), tw);
    rep.set_mean("N20", mean(&|i| l.cell_ring[i].len() as f64), tw);
    rep.set_mean("corners", mean(&|i| t.cells[i].len() as f64), tw);
    rep.set_mean("RD", mean(&|i| t.cells[i].roundness()), tw);
    rep.set("typical_cells", typ.len() as f64);

    if !verts.is_empty() {
        let nv = verts.len() as f64;
        rep.set_mean("N02", verts.iter().map(|&v| l.vertex_cells[v].len() as f64).sum::<f64>() / nv, nv);
        let mut kinds = [0usize; 4];
        for &v in &verts {
            let k = match l.classify(v, DEFAULT_TOL_ANGLE) {
                Some(VertexKind::X) => 0,
                Some(VertexKind::Y) => 1,
                Some(VertexKind::T) => 2,
                _ => 3,
            };
            kinds[k] += 1;
        }
        for (name, k) in ["frac_X", "frac_Y", "frac_T", "frac_other"].iter().zip(kinds) {
            rep.set_mean(name, k as f64 / nv, nv);
        }
        rep.set_mean("phi", verts.iter().filter(|&&v| l.vertex_pi[v]).count() as f64 / nv, nv);
    }
    let s = segment_decomposition(t);
    rep.set("n_K", s.k as f64);
    rep.set("n_J", s.j as f64);
    rep.set("n_I", s.i as f64);
    Ok(rep)
}

/// Face intensities, densities and typical-cell summaries of a spatial tessellation.
pub fn estimate_spatial(t: &SpatialTessellation, opts: &EstimateOptions) -> Result<Report> {
    let l = &t.lattice;
    let r = Reference::of(&t.window, opts.interior_fraction);
    let vol = r.content;
    let verts: Vec<usize> = (0..l.vertices.len()).filter(|&v| !l.vertex_boundary[v] && r.contains(l.vertices[v])).collect();
    let inner_edges: Vec<usize> = (0..l.edges.len()).filter(|&e| !l.edge_boundary[e]).collect();
    let edges: Vec<usize> = inner_edges
        .iter()
        .copied()
        .filter(|&e| {
            let (a, b) = l.edge_segment[e];
            r.contains((a + b) * 0.5)
        })
        .collect();
    let inner_facets: Vec<usize> = (0..l.facets.len()).filter(|&f| !l.facet_boundary[f]).collect();
    let facet_center = |f: usize| {
        let p = &l.facet_points[f];
        p.iter().fold(Vec3::zero(), |a, &b| a + b) * (1.0 / p.len() as f64)
    };
    let facets: Vec<usize> = inner_facets.iter().copied().filter(|&f| r.contains(facet_center(f))).collect();
    let n_cells = t.cells.iter().filter(|c| r.contains(opts.centroid.polyhedron(c))).count();
    if n_cells == 0 {
        return Err(insufficient("cells"));
    }
    let mut rep = Report::single(3);
    let g = [verts.len(), edges.len(), facets.len(), n_cells].map(|n| n as f64 / vol);
    for (k, v) in g.iter().enumerate() {
        rep.set(&format!("gamma{k}"), *v);
    }
    rep.set("mu0", g[0]);
    let mu1 = kahan_sum(inner_edges.iter().map(|&e| {
        let (a, b) = l.edge_segment[e];
        r.segment_length(a, b)
    })) / vol;
    let mu2 = kahan_sum(inner_facets.iter().map(|&f| {
        let p = r.clip_points(&l.facet_points[f]);
        if p.len() < 3 {
            0.0
        } else {
            polygon_area_3d(&p)
        }
    })) / vol;
    let mu3 = kahan_sum(t.cells.iter().map(|c| r.clip(c).map_or(0.0, |k| k.volume()))) / vol;
    rep.set("mu1", mu1);
    rep.set("mu2", mu2);
    rep.set("mu3", mu3);
    if g[1] > 0.0 {
        rep.set_mean("L1", mu1 / g[1], edges.len() as f64);
    }
    if !facets.is_empty() {
        let nf = facets.len() as f64;
        rep.set_mean("A2", facets.iter().map(|&f| l.facet_area(f)).sum::<f64>() / nf, nf);
        rep.set_mean(
            "P2",
            facets
                .iter()
                .map(|&f| {
                    let p = &l.facet_points[f];
                    (0..p.len()).map(|i| p[i].dist(p[(i + 1) % p.len()])).sum::<f64>()
                })
                .sum::<f64>()
                / nf,
            nf,
        );
        rep.set_mean("N21", facets.iter().map(|&f| l.facets[f].len() as f64).sum::<f64>() / nf, nf);
    }
    if !verts.is_empty() {
        let nv = verts.len() as f64;
        rep.set_mean("N03", verts.iter().map(|&v| l.vertex_cells[v].len() as f64).sum::<f64>() / nv, nv);
    }
    rep.set("n_cells", n_cells as f64);

    let (typ, weighted) = typical_cells(&t.cells, &t.domain, &t.window, &r, |c| opts.centroid.polyhedron(c), l.tol);
    if typ.is_empty() {
        return Err(insufficient("typical cells"));
    }
    let tw = kahan_sum(typ.iter().map(|t| t.1));
    if weighted {
        rep.set("gamma3_ml", tw);
    }
    let mean = |f: &dyn Fn(usize) -> f64| wmean(&typ.iter().map(|&(i, w)| (f(i), w)).collect::<Vec<_>>());
    rep.set_mean("V3", mean(&|i| t.cells[i].volume()), tw);
    rep.set_mean("S3", mean(&|i| t.cells[i].surface_area()), tw);
    rep.set_mean("B3", mean(&|i| t.cells[i].mean_width()), tw);
    rep.set_mean("L3", mean(&|i| t.cells[i].total_edge_length()), tw);
    rep.set_mean("N30", mean(&|i| l.cell_vertices[i].len() as f64), tw);
    rep.set_mean("N31", mean(&|i| l.cell_edges[i].len() as f64), tw);
    rep.set_mean("N32", mean(&|i| l.cell_facets[i].len() as f64), tw);
    rep.set("typical_cells", typ.len() as f64);
    Ok(rep)
}

/// Cell areas, counts, adjacency and boundary length of a raster tessellation (no edge correction).
pub fn estimate_raster(rt: &RasterTessellation) -> Report {
    let s = rt.stats();
    let area = rt.window_area();
    let mut rep = Report::single(2);
    let n = s.n_cells();
    rep.set("n_cells", n as f64);
    rep.set("gamma2", n as f64 / area);
    if n > 0 {
        let nf = n as f64;
        rep.set_mean("A2", kahan_sum(s.present().map(|i| s.areas[i])) / nf, nf);
        rep.set_mean("N_adj", s.mean_neighbors(), nf);
        rep.set_mean("components", s.present().map(|i| s.components[i] as f64).sum::<f64>() / nf, nf);
    }
    rep.set("mu1", s.boundary_length / area);
    rep
}
