//! Seeded samplers for point, marked point and hyperplane processes.

mod hyperplanes;
mod marks;
mod points;
mod seed;

pub use hyperplanes::{sample_poisson_lines, sample_poisson_planes};
pub use marks::{attach_marks, MarkDistribution, MarkKind, Marks};
pub use points::{
    periodic_copies, sample_matern_cluster, sample_poisson, sample_poisson_count, sample_ssi, thin_inhomogeneous,
    uniform_in, PointPattern, SsiOutcome,
};
pub use seed::Seed;

/// Upper bound on the expected number of points in a single draw.
pub const MAX_EXPECTED_POINTS: f64 = 1e8;
