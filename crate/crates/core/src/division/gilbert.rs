use rand::Rng;
use serde::{Deserialize, Serialize};

use super::network::Network;
use super::planar_domain;
use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, Vec2, Vector, Window};
use crate::process::{sample_poisson, Seed};
use crate::tess::PlanarTessellation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GilbertMode {
    #[default]
    Isotropic,
    Rectangular,
}

/// Largest `t >= 0` with `p + t d` still in `c`.
pub(crate) fn exit_time(c: &ConvexPolygon, p: Vec2, d: Vec2) -> f64 {
    let mut t = f64::INFINITY;
    for (a, b) in c.edges() {
        let inward = (b - a).perp();
        let rate = inward.dot(d);
        if rate < 0.0 {
            t = t.min(inward.dot(p - a) / -rate);
        }
    }
    t.max(0.0)
}

/// Parameters `(s, u)` with `p + s d = q + u e`, if the directions are not parallel.
pub(crate) fn ray_meet(p: Vec2, d: Vec2, q: Vec2, e: Vec2) -> Option<(f64, f64)> {
    let den = d.cross(e);
    if den.abs() < 1e-14 {
        return None;
    }
    let r = q - p;
    Some((r.cross(e) / den, r.cross(d) / den))
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    arm: usize,
    /// Blocking arm and the position on it, or `None` for the window boundary.
    by: Option<(usize, f64)>,
}

/// Gilbert crack tessellation: cracks grow at unit speed in both directions
/// from Poisson seeds and an arm stops when its tip meets an existing crack.
pub fn gilbert(w: &Window<ConvexPolygon>, lambda: f64, mode: GilbertMode, seed: Seed) -> Result<PlanarTessellation> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("intensity must be positive, got {lambda}")));
    }
    let dom = planar_domain(w)?;
    let mut rng = seed.rng(0, "gilbert");
    let seeds = sample_poisson(w, lambda, &mut rng)?;
    let n = seeds.len();
    let dirs: Vec<Vec2> = (0..n)
        .map(|_| match mode {
            GilbertMode::Isotropic => Vec2::from_angle(rng.random::<f64>() * std::f64::consts::PI),
            GilbertMode::Rectangular => {
                if rng.random::<bool>() {
                    Vec2 { x: 1.0, y: 0.0 }
                } else {
                    Vec2 { x: 0.0, y: 1.0 }
                }
            }
        })
        .collect();
    // Arm 2i grows along +d_i, arm 2i+1 along -d_i.
    let origin = |a: usize| seeds.points[a / 2];
    let dir = |a: usize| if a.is_multiple_of(2) { dirs[a / 2] } else { -dirs[a / 2] };
    let m = 2 * n;
    let exits: Vec<f64> = (0..m).map(|a| exit_time(&dom, origin(a), dir(a))).collect();

    let mut events: Vec<Event> = (0..m).map(|a| Event { time: exits[a], arm: a, by: None }).collect();
    for i in 0..m {
        for j in (i + 1)..m {
            if i / 2 == j / 2 {
                continue;
            }
            let Some((si, sj)) = ray_meet(origin(i), dir(i), origin(j), dir(j)) else { continue };
            if si <= 0.0 || sj <= 0.0 || si > exits[i] || sj > exits[j] {
                continue;
            }
            if sj < si {
                events.push(Event { time: si, arm: i, by: Some((j, sj)) });
            } else if si < sj {
                events.push(Event { time: sj, arm: j, by: Some((i, si)) });
            }
        }
    }
    events.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.arm.cmp(&b.arm)));

    let mut stop: Vec<Option<(f64, Option<(usize, f64)>)>> = vec![None; m];
    for e in &events {
        if stop[e.arm].is_some() {
            continue;
        }
        if let Some((j, sj)) = e.by {
            // the blocker must have reached the meeting point before stopping
            if matches!(stop[j], Some((tj, _)) if tj < sj) {
                continue;
            }
        }
        stop[e.arm] = Some((e.time, e.by));
    }

    let mut net = Network::with_boundary(&dom);
    let cracks: Vec<usize> = (0..n).map(|_| net.segment()).collect();
    let ends: Vec<usize> = (0..m)
        .map(|a| {
            let (s, _) = stop[a].expect("every arm stops");
            net.point(origin(a) + dir(a) * s)
        })
        .collect();
    for a in 0..m {
        let (s, by) = stop[a].unwrap();
        let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
        net.attach(cracks[a / 2], sign * s, ends[a]);
        match by {
            Some((j, sj)) => {
                let sj_sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                net.attach(cracks[j / 2], sj_sign * sj, ends[a]);
            }
            None => net.attach_to_boundary(ends[a]),
        }
    }
    let cells = net.cells();
    let mut t = PlanarTessellation::from_cells("gilbert", w.clone(), cells);
    t.generators = Some(seeds);
    t.diagnostics.insert("cracks".into(), n as f64);
    Ok(t)
}
