//! File formats: JSON documents for realizations, SVG drawings, CSV tables.

mod csv;
mod json;
mod svg;

pub use self::csv::report_csv;
pub use json::{export_json, import_json, read_document, write_document, Meta, SCHEMA_VERSION};
pub use svg::{render_svg, ColorBy};
