//! Sequential constructions: cell division (STIT and variants), crack growth,
//! particle systems, dead leaves and iteration of tessellations.

mod split;

pub use split::{
    cell_division, chord_min_angle, stit, stit_rejection, DivisionConfig, DivisionRule, LifetimeRule, StopRule, MAX_CELLS,
};

mod acs;
mod gilbert;
mod iterate;
mod leaves;
mod network;

pub use acs::acs;
pub use gilbert::{gilbert, GilbertMode};
pub use iterate::{iterate, ComponentGen, IterateMode};
pub use leaves::{dead_leaves, DeadLeaves, Leaf, LeafModel, LeafShape, MIN_LEAF_RESOLUTION};

use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, Window};
use crate::tess::domain_of;

/// Region for sequential constructions, which have no torus version.
pub(crate) fn planar_domain(w: &Window<ConvexPolygon>) -> Result<ConvexPolygon> {
    if w.is_periodic() {
        return Err(Error::Parameter("sequential constructions do not support periodic windows".into()));
    }
    Ok(domain_of(w))
}
