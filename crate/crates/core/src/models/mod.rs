//! Declarative model specifications shared by the command line and the bindings.

mod sweep;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub use sweep::{monte_carlo_sweep, SweepRow, SweepTable, DEFAULT_Z_THRESHOLD};

use crate::characteristics::{
    estimate_planar, estimate_raster, estimate_spatial, oracle_poisson_delaunay, oracle_poisson_line,
    oracle_poisson_voronoi, oracle_stit, EstimateOptions, Oracle, Report,
};
use crate::distance::{beta_delaunay, delaunay, laguerre, laguerre3, raster_assign, voronoi, voronoi3, BetaVariant, RasterModel};
use crate::division::{
    acs, cell_division, dead_leaves, gilbert, iterate, stit, DeadLeaves, DivisionConfig, GilbertMode, IterateMode, LeafModel,
    LifetimeRule, DivisionRule, StopRule,
};
use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, ConvexPolyhedron, DirectionRose, EdgeMode, SphericalRose, Window};
use crate::hyperplane::{poisson_line_tessellation, poisson_plane_tessellation};
use crate::process::{attach_marks, sample_poisson, MarkDistribution, MarkKind, Seed};
use crate::tess::{PlanarTessellation, RasterTessellation, Tessellation};

/// Square (or cube) window `[0, side]^d` with an edge treatment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    #[serde(default = "unit")]
    pub side: f64,
    #[serde(default)]
    pub edge_mode: EdgeMode,
}

fn unit() -> f64 {
    1.0
}

fn two() -> usize {
    2
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self { side: 1.0, edge_mode: EdgeMode::None }
    }
}

impl WindowSpec {
    pub fn planar(&self) -> Result<Window<ConvexPolygon>> {
        Window::square(self.side, self.edge_mode)
    }

    pub fn spatial(&self) -> Result<Window<ConvexPolyhedron>> {
        Window::cube(self.side, self.edge_mode)
    }
}

/// One model with its parameters, as read from a params file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    Voronoi {
        lambda: f64,
        #[serde(default = "two")]
        dim: usize,
        #[serde(default)]
        window: WindowSpec,
    },
    Laguerre {
        lambda: f64,
        radius: MarkDistribution,
        #[serde(default = "two")]
        dim: usize,
        #[serde(default)]
        window: WindowSpec,
    },
    Delaunay {
        lambda: f64,
        #[serde(default)]
        window: WindowSpec,
    },
    BetaDelaunay {
        gamma: f64,
        beta: f64,
        variant: BetaVariant,
        #[serde(default)]
        height_bound: Option<f64>,
        #[serde(default)]
        window: WindowSpec,
    },
    Plt {
        lambda: f64,
        #[serde(default)]
        rose: DirectionRose,
        #[serde(default)]
        window: WindowSpec,
    },
    Php3d {
        lambda: f64,
        #[serde(default)]
        rose: SphericalRose,
        #[serde(default)]
        window: WindowSpec,
    },
    Stit {
        a: f64,
        #[serde(default)]
        rose: DirectionRose,
        #[serde(default)]
        window: WindowSpec,
    },
    Division {
        config: DivisionConfig,
        #[serde(default)]
        window: WindowSpec,
    },
    Gilbert {
        lambda: f64,
        #[serde(default = "isotropic_cracks")]
        mode: GilbertMode,
        #[serde(default)]
        window: WindowSpec,
    },
    Acs {
        lambda: f64,
        #[serde(default)]
        window: WindowSpec,
    },
    DeadLeaves {
        leaves: LeafModel,
        resolution: usize,
        #[serde(default)]
        window: WindowSpec,
    },
    /// Frame tessellation whose cells are subdivided (or overlaid) by a component model.
    Iterate {
        frame: Box<ModelSpec>,
        component: Box<ModelSpec>,
        mode: IterateMode,
        #[serde(default = "always")]
        p: f64,
    },
    Raster {
        lambda: f64,
        engine: RasterModel,
        resolution: usize,
        #[serde(default)]
        radius: Option<MarkDistribution>,
        #[serde(default)]
        weight: Option<MarkDistribution>,
        /// Shared matrix mark for every generator (generalised balanced power diagrams).
        #[serde(default)]
        matrix: Option<[[f64; 2]; 2]>,
        #[serde(default)]
        window: WindowSpec,
    },
}

fn isotropic_cracks() -> GilbertMode {
    GilbertMode::Isotropic
}

fn always() -> f64 {
    1.0
}

/// A generated realization.
#[derive(Debug, Clone, PartialEq)]
pub enum Realization {
    Tessellation(Tessellation),
    Raster(RasterTessellation),
    Leaves(DeadLeaves),
}

impl Realization {
    pub fn report(&self, opts: &EstimateOptions) -> Result<Report> {
        match self {
            Realization::Tessellation(Tessellation::Planar(t)) => estimate_planar(t, opts),
            Realization::Tessellation(Tessellation::Spatial(t)) => estimate_spatial(t, opts),
            Realization::Raster(r) => Ok(estimate_raster(r)),
            Realization::Leaves(d) => Ok(estimate_raster(&d.raster)),
        }
    }

    pub fn planar(&self) -> Option<&PlanarTessellation> {
        match self {
            Realization::Tessellation(Tessellation::Planar(t)) => Some(t),
            _ => None,
        }
    }
}

/// Model names (and the family shorthands `pv2`, `pv3`, `pdt`) with default parameters.
fn alias(name: &str) -> Option<(&'static str, Value)> {
    let periodic = serde_json::json!({ "side": 1.0, "edge_mode": { "mode": "periodic" } });
    Some(match name {
        "pv2" => ("voronoi", serde_json::json!({ "lambda": 100.0, "dim": 2, "window": periodic })),
        "pv3" => ("voronoi", serde_json::json!({ "lambda": 100.0, "dim": 3, "window": { "side": 1.0, "edge_mode": { "mode": "plus", "margin": 0.3 } } })),
        "pdt" => ("delaunay", serde_json::json!({ "lambda": 100.0, "window": periodic })),
        "voronoi" => ("voronoi", serde_json::json!({ "lambda": 100.0 })),
        "laguerre" => ("laguerre", serde_json::json!({ "lambda": 100.0, "radius": { "kind": "uniform", "a": 0.0, "b": 0.05 } })),
        "delaunay" => ("delaunay", serde_json::json!({ "lambda": 100.0 })),
        "plt" => ("plt", serde_json::json!({ "lambda": 10.0 })),
        "php3d" => ("php3d", serde_json::json!({ "lambda": 5.0 })),
        "stit" => ("stit", serde_json::json!({ "a": 10.0 })),
        "gilbert" => ("gilbert", serde_json::json!({ "lambda": 20.0 })),
        "acs" => ("acs", serde_json::json!({ "lambda": 10.0 })),
        _ => return None,
    })
}

impl ModelSpec {
    /// Spec from a model name and a params object; defaults fill in keys the params leave out.
    pub fn from_parts(model: &str, params: Value) -> Result<Self> {
        let mut obj = match params {
            Value::Object(m) => m,
            Value::Null => Map::new(),
            _ => return Err(Error::Parameter("params must be a JSON object".into())),
        };
        if let Some(m) = obj.get("model").and_then(Value::as_str) {
            if m != model && alias(model).map(|a| a.0) != Some(m) {
                return Err(Error::Parameter(format!("params are for model {m:?}, not {model:?}")));
            }
        }
        let name = match alias(model) {
            Some((name, Value::Object(defaults))) => {
                for (k, v) in defaults {
                    obj.entry(k).or_insert(v);
                }
                name
            }
            _ => model,
        };
        obj.insert("model".into(), Value::String(name.into()));
        serde_json::from_value(Value::Object(obj)).map_err(|e| Error::Parameter(format!("{model}: {e}")))
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Voronoi { .. } => "voronoi",
            ModelSpec::Laguerre { .. } => "laguerre",
            ModelSpec::Delaunay { .. } => "delaunay",
            ModelSpec::BetaDelaunay { .. } => "beta-delaunay",
            ModelSpec::Plt { .. } => "plt",
            ModelSpec::Php3d { .. } => "php3d",
            ModelSpec::Stit { .. } => "stit",
            ModelSpec::Division { .. } => "division",
            ModelSpec::Gilbert { .. } => "gilbert",
            ModelSpec::Acs { .. } => "acs",
            ModelSpec::DeadLeaves { .. } => "dead-leaves",
            ModelSpec::Iterate { .. } => "iterate",
            ModelSpec::Raster { .. } => "raster",
        }
    }

    pub fn window(&self) -> WindowSpec {
        match self {
            ModelSpec::Voronoi { window, .. }
            | ModelSpec::Laguerre { window, .. }
            | ModelSpec::Delaunay { window, .. }
            | ModelSpec::BetaDelaunay { window, .. }
            | ModelSpec::Plt { window, .. }
            | ModelSpec::Php3d { window, .. }
            | ModelSpec::Stit { window, .. }
            | ModelSpec::Division { window, .. }
            | ModelSpec::Gilbert { window, .. }
            | ModelSpec::Acs { window, .. }
            | ModelSpec::DeadLeaves { window, .. }
            | ModelSpec::Raster { window, .. } => *window,
            ModelSpec::Iterate { frame, .. } => frame.window(),
        }
    }

    pub fn generate(&self, seed: Seed) -> Result<Realization> {
        let w = self.window();
        Ok(match self {
            ModelSpec::Voronoi { lambda, dim: 3, .. } => {
                let w = w.spatial()?;
                let p = sample_poisson(&w, *lambda, &mut seed.rng(0, "points"))?;
                Realization::Tessellation(Tessellation::Spatial(voronoi3(&p, &w)?))
            }
            ModelSpec::Laguerre { lambda, radius, dim: 3, .. } => {
                let w = w.spatial()?;
                let p = sample_poisson(&w, *lambda, &mut seed.rng(0, "points"))?;
                let p = attach_marks(p, radius, MarkKind::Radius, &mut seed.rng(0, "marks"))?;
                Realization::Tessellation(Tessellation::Spatial(laguerre3(&p, &w)?))
            }
            ModelSpec::Php3d { lambda, rose, .. } => Realization::Tessellation(Tessellation::Spatial(
                poisson_plane_tessellation(&w.spatial()?, *lambda, rose, &mut seed.rng(0, "planes"))?,
            )),
            ModelSpec::Voronoi { dim, .. } | ModelSpec::Laguerre { dim, .. } if *dim != 2 => {
                return Err(Error::Parameter(format!("dim must be 2 or 3, got {dim}")))
            }
            ModelSpec::DeadLeaves { leaves, resolution, .. } => {
                Realization::Leaves(dead_leaves(&w.planar()?, leaves, *resolution, seed)?)
            }
            ModelSpec::Raster { lambda, engine, resolution, radius, weight, matrix, .. } => {
                let w = w.planar()?;
                let mut p = sample_poisson(&w, *lambda, &mut seed.rng(0, "points"))?;
                if let Some(r) = radius {
                    p = attach_marks(p, r, MarkKind::Radius, &mut seed.rng(0, "radius"))?;
                }
                let weight = weight.or(match engine {
                    RasterModel::Gbpd => Some(MarkDistribution::Constant { value: 0.0 }),
                    RasterModel::Multiplicative => Some(MarkDistribution::Constant { value: 1.0 }),
                    _ => None,
                });
                if let Some(wd) = weight {
                    p = attach_marks(p, &wd, MarkKind::Weight, &mut seed.rng(0, "weight"))?;
                }
                if *engine == RasterModel::Gbpd {
                    let m = matrix.unwrap_or([[1.0, 0.0], [0.0, 1.0]]);
                    p.marks.matrix = Some(vec![vec![m[0][0], m[0][1], m[1][0], m[1][1]]; p.len()]);
                }
                Realization::Raster(raster_assign(&p, *engine, *resolution, &w)?)
            }
            _ => Realization::Tessellation(Tessellation::Planar(self.generate_planar(&w.planar()?, seed)?)),
        })
    }

    /// Planar realization in the given window (ignores the spec's own window).
    pub fn generate_planar(&self, w: &Window<ConvexPolygon>, seed: Seed) -> Result<PlanarTessellation> {
        match self {
            ModelSpec::Voronoi { lambda, dim: 2, .. } => {
                let p = sample_poisson(w, *lambda, &mut seed.rng(0, "points"))?;
                voronoi(&p, w)
            }
            ModelSpec::Laguerre { lambda, radius, dim: 2, .. } => {
                let p = sample_poisson(w, *lambda, &mut seed.rng(0, "points"))?;
                let p = attach_marks(p, radius, MarkKind::Radius, &mut seed.rng(0, "marks"))?;
                laguerre(&p, w)
            }
            ModelSpec::Delaunay { lambda, .. } => {
                let p = sample_poisson(w, *lambda, &mut seed.rng(0, "points"))?;
                delaunay(&p, w)
            }
            ModelSpec::BetaDelaunay { gamma, beta, variant, height_bound, .. } => {
                beta_delaunay(*gamma, *beta, *variant, w, *height_bound, &mut seed.rng(0, "generators"))
            }
            ModelSpec::Plt { lambda, rose, .. } => poisson_line_tessellation(w, *lambda, rose, &mut seed.rng(0, "lines")),
            ModelSpec::Stit { a, rose, .. } => stit(w, *a, rose, seed),
            ModelSpec::Division { config, .. } => cell_division(w, config, seed),
            ModelSpec::Gilbert { lambda, mode, .. } => gilbert(w, *lambda, *mode, seed),
            ModelSpec::Acs { lambda, .. } => acs(w, *lambda, seed),
            ModelSpec::Iterate { frame, component, mode, p } => {
                let t0 = frame.generate_planar(w, seed.derive(0, "frame"))?;
                let gen = |cw: &Window<ConvexPolygon>, s: Seed| component.generate_planar(cw, s);
                iterate(&t0, &gen, *mode, *p, seed.derive(0, "iterate"))
            }
            other => Err(Error::Parameter(format!("model {} does not produce a planar polygonal tessellation", other.name()))),
        }
    }

    /// Analytic mean values, where the model has them.
    pub fn oracle(&self) -> Result<Option<Oracle>> {
        Ok(match self {
            ModelSpec::Voronoi { lambda, dim, .. } => Some(oracle_poisson_voronoi(*lambda, *dim)?),
            // equal radii leave the power cells unchanged
            ModelSpec::Laguerre { lambda, radius: MarkDistribution::Constant { .. }, dim, .. } => {
                Some(oracle_poisson_voronoi(*lambda, *dim)?)
            }
            ModelSpec::Delaunay { lambda, .. } => Some(oracle_poisson_delaunay(*lambda)?),
            ModelSpec::Plt { lambda, rose: DirectionRose::Isotropic, .. } => Some(oracle_poisson_line(*lambda)?),
            ModelSpec::Acs { lambda, .. } => {
                let mut o = oracle_poisson_line(*lambda)?;
                o.model = "acs".into();
                // only the cell intensity and mean area carry over
                o.values.retain(|k, _| matches!(k.as_str(), "gamma2" | "A2" | "mu1" | "mu2"));
                Some(o)
            }
            ModelSpec::Stit { a, rose: DirectionRose::Isotropic, .. } => Some(oracle_stit(*a)?),
            ModelSpec::Division { config, .. }
                if config.lifetime == LifetimeRule::LStit
                    && config.division == DivisionRule::DStit
                    && config.asa_min_angle == 0.0
                    && config.rose == DirectionRose::Isotropic =>
            {
                match config.stop {
                    StopRule::Time { a } => Some(oracle_stit(a)?),
                    StopRule::Cells { .. } => None,
                }
            }
            _ => None,
        })
    }

    /// PLT intensity matching a STIT or ACS model, for comparisons.
    pub fn matched_line_intensity(&self) -> Option<f64> {
        match self {
            ModelSpec::Stit { a, .. } => Some(*a),
            ModelSpec::Acs { lambda, .. } | ModelSpec::Plt { lambda, .. } => Some(*lambda),
            _ => None,
        }
    }
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Voronoi { lambda: 100.0, dim: 2, window: WindowSpec::default() }
    }
}
