use serde::{Deserialize, Serialize};

use super::vector::{Vec2, Vector};
use crate::error::{Error, Result};

/// Default collinearity tolerance in radians.
pub const DEFAULT_TOL_ANGLE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexKind {
    X,
    Y,
    T,
    Other,
}

/// Classifies a planar vertex by the directions of its incident edges.
pub fn classify_vertex(directions: &[Vec2], tol_angle: f64) -> Result<VertexKind> {
    if directions.len() < 3 {
        return Err(Error::InvalidVertex(format!("{} incident edges, need at least 3", directions.len())));
    }
    let u: Vec<Vec2> = directions.iter().map(|d| d.normalized()).collect();
    let opposite = |a: Vec2, b: Vec2| {
        // angle between a and -b
        let c = -a.dot(b);
        let s = a.cross(b).abs();
        s.atan2(c).abs() <= tol_angle
    };
    let mut pairs = Vec::new();
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            if opposite(u[i], u[j]) {
                pairs.push((i, j));
            }
        }
    }
    Ok(match (u.len(), pairs.len()) {
        (3, 0) => VertexKind::Y,
        (3, 1) => VertexKind::T,
        (4, 2) if {
            let (a, b) = (pairs[0], pairs[1]);
            a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1
        } =>
        {
            VertexKind::X
        }
        _ => VertexKind::Other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::vec2;

    #[test]
    fn classifies_basic_shapes() {
        let e1 = vec2(1.0, 0.0);
        let e2 = vec2(0.0, 1.0);
        assert_eq!(classify_vertex(&[e1, -e1, e2, -e2], DEFAULT_TOL_ANGLE).unwrap(), VertexKind::X);
        let y: Vec<Vec2> = [0.0f64, 120.0, 240.0].iter().map(|a| Vec2::from_angle(a.to_radians())).collect();
        assert_eq!(classify_vertex(&y, DEFAULT_TOL_ANGLE).unwrap(), VertexKind::Y);
        assert_eq!(classify_vertex(&[e1, -e1, e2], DEFAULT_TOL_ANGLE).unwrap(), VertexKind::T);
        assert!(matches!(classify_vertex(&[e1, e2], DEFAULT_TOL_ANGLE), Err(Error::InvalidVertex(_))));
    }
}
