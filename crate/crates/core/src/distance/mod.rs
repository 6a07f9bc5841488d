//! Voronoi, Laguerre and Delaunay engines, beta-Delaunay, centroidal Voronoi and a
//! raster engine for weighted and non-Euclidean distance models.

mod beta;
mod delaunay;
mod diagram;
mod lloyd;
mod power;
mod raster;

pub use beta::{beta_constant, beta_delaunay, default_height_bound, BetaVariant};
pub use delaunay::{delaunay, delaunay_triangles, Triangulation};
pub use diagram::{laguerre, laguerre3, power_diagram, power_diagram3, voronoi, voronoi3};
pub use lloyd::{lloyd_centroidal, LloydResult};
pub use raster::{label_agreement, raster_assign, rasterize, GbpdGenerator, Norm, RasterModel, MIN_RESOLUTION};
