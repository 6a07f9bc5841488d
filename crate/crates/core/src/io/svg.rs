use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::Realization;
use crate::tess::{RasterTessellation, Tessellation};

/// What determines a cell's fill colour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorBy {
    #[default]
    Cell,
    Generator,
    Leaf,
}

impl std::str::FromStr for ColorBy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cell" => Ok(ColorBy::Cell),
            "generator" => Ok(ColorBy::Generator),
            "leaf" => Ok(ColorBy::Leaf),
            _ => Err(Error::Parameter(format!("unknown colouring {s:?}, expected cell|generator|leaf"))),
        }
    }
}

/// Pastel colour from an index (splitmix64 finaliser).
fn fill(i: usize) -> String {
    let mut z = (i as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    let c = |s: u32| 96 + ((z >> s) & 0x9f) as u8;
    format!("#{:02x}{:02x}{:02x}", c(0), c(8), c(16))
}

fn header(out: &mut String, lo: (f64, f64), hi: (f64, f64)) {
    let (w, h) = (hi.0 - lo.0, hi.1 - lo.1);
    let px = 800.0;
    let height = px * h / w;
    // y axis up: flip about the window's vertical centre
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{px}\" height=\"{height}\" viewBox=\"{} {} {w} {h}\">",
        lo.0, -hi.1
    );
    let _ = writeln!(out, "<g transform=\"scale(1,-1)\" stroke=\"black\" stroke-width=\"{}\" stroke-linejoin=\"round\">", w / 800.0);
}

fn raster(out: &mut String, r: &RasterTessellation) {
    let (dx, dy) = r.pixel_size();
    let n = r.resolution;
    let _ = writeln!(out, "<g stroke=\"none\">");
    for j in 0..n {
        let mut i = 0;
        while i < n {
            let l = r.label(i, j);
            let mut k = i + 1;
            while k < n && r.label(k, j) == l {
                k += 1;
            }
            let _ = writeln!(
                out,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{dy}\" fill=\"{}\"/>",
                r.lo.x + i as f64 * dx,
                r.lo.y + j as f64 * dy,
                (k - i) as f64 * dx,
                fill(l as usize)
            );
            i = k;
        }
    }
    let _ = writeln!(out, "</g>");
}

/// SVG drawing of a planar realization: filled cells with black boundaries.
pub fn render_svg(r: &Realization, color_by: ColorBy) -> Result<String> {
    let mut out = String::new();
    match r {
        Realization::Tessellation(Tessellation::Planar(t)) => {
            if color_by == ColorBy::Leaf {
                return Err(Error::Parameter("leaf colouring needs a dead-leaves realization".into()));
            }
            let (lo, hi) = t.window.bounds();
            header(&mut out, (lo.x, lo.y), (hi.x, hi.y));
            for (i, c) in t.cells.iter().enumerate() {
                let key = match color_by {
                    ColorBy::Generator => t.cell_generator[i].unwrap_or(i),
                    _ => i,
                };
                let pts: Vec<String> = c.vertices().iter().map(|v| format!("{},{}", v.x, v.y)).collect();
                let _ = writeln!(out, "<polygon points=\"{}\" fill=\"{}\"/>", pts.join(" "), fill(key));
            }
        }
        Realization::Raster(rt) => {
            if color_by == ColorBy::Leaf {
                return Err(Error::Parameter("leaf colouring needs a dead-leaves realization".into()));
            }
            header(&mut out, (rt.lo.x, rt.lo.y), (rt.hi.x, rt.hi.y));
            raster(&mut out, rt);
        }
        Realization::Leaves(d) => {
            let rt = &d.raster;
            header(&mut out, (rt.lo.x, rt.lo.y), (rt.hi.x, rt.hi.y));
            raster(&mut out, rt);
        }
        Realization::Tessellation(Tessellation::Spatial(_)) => {
            return Err(Error::Parameter("only planar realizations can be rendered".into()))
        }
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{vec2, ConvexPolygon, Window};
    use crate::tess::PlanarTessellation;

    #[test]
    fn two_cells_two_polygons() {
        let w = Window::unit_square();
        let cells = vec![
            ConvexPolygon::rect(vec2(0.0, 0.0), vec2(0.5, 1.0)),
            ConvexPolygon::rect(vec2(0.5, 0.0), vec2(1.0, 1.0)),
        ];
        let r = Realization::Tessellation(Tessellation::Planar(PlanarTessellation::from_cells("test", w, cells)));
        let s = render_svg(&r, ColorBy::Cell).unwrap();
        assert_eq!(s.matches("<polygon ").count(), 2);
        assert!(s.starts_with("<svg ") && s.ends_with("</svg>\n"));
        assert!(s.contains("stroke=\"black\""));
        assert_eq!(s, render_svg(&r, ColorBy::Cell).unwrap());
        assert!(render_svg(&r, ColorBy::Leaf).is_err());
        assert_ne!(fill(0), fill(1));
    }
}
