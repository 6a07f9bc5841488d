//! Estimators, analytic mean-value formulas and validation helpers.

mod estimate;
mod oracle;
mod quad;
mod report;
mod stats;
mod typical;

pub use estimate::{
    estimate, estimate_planar, estimate_raster, estimate_spatial, segment_decomposition, EstimateOptions, Facets, Reference,
    Segments, DEFAULT_INTERIOR_FRACTION,
};
pub use oracle::{
    oracle_johnson_mehl_mu, oracle_poisson_delaunay, oracle_poisson_line, oracle_poisson_voronoi, oracle_stit,
    poisson_voronoi_mu, unit_ball_volume, Oracle,
};
pub use quad::{integrate, integrate_half_line};
pub use report::Report;
pub use stats::{kahan_sum, ks_statistic, mean_se, paired_sign_test, sign_test_p};
pub use typical::{estimate_lambda, sample_pdt_typical_cell, Family, LambdaEstimate};
