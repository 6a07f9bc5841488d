//! Simulation, estimation and validation of planar and spatial random tessellations.

pub mod characteristics;
pub mod distance;
pub mod division;
pub mod error;
pub mod geom;
pub mod hyperplane;
pub mod io;
pub mod models;
pub mod process;
pub mod tess;

pub use error::{Error, Result};
