use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::gilbert::{exit_time, ray_meet};
use super::network::Network;
use super::planar_domain;
use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, DirectionRose, Vec2, Vector, Window};
use crate::process::{sample_poisson_lines, Seed};
use crate::tess::PlanarTessellation;

struct Particle {
    origin: Vec2,
    /// Unit direction with positive `x` component.
    dir: Vec2,
    seg: usize,
    exit: f64,
    next_branch: f64,
    alive: bool,
}

impl Particle {
    fn at(&self, s: f64) -> Vec2 {
        self.origin + self.dir * s
    }

    /// Arc length at which the particle reaches abscissa `x`.
    fn arc_at(&self, x: f64) -> f64 {
        (x - self.origin.x) / self.dir.x
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Birth(usize),
    Exit(usize),
    Branch(usize),
    Collide(usize, usize),
}

fn rightward(d: Vec2) -> Vec2 {
    if d.x < 0.0 {
        -d
    } else {
        d
    }
}

/// Arak–Clifford–Surgailis tessellation for the isotropic line measure with
/// mean line length `lambda` per unit area.
///
/// The abscissa plays the role of time. Particles enter through the window
/// boundary along Poisson lines, branch at rate `lambda / pi` per unit length,
/// and a collision kills one of the two particles by a fair coin.
pub fn acs(w: &Window<ConvexPolygon>, lambda: f64, seed: Seed) -> Result<PlanarTessellation> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("intensity must be positive, got {lambda}")));
    }
    let dom = planar_domain(w)?;
    let mut rng = seed.rng(0, "acs");
    let branch_len = Exp::new(lambda / PI).map_err(|e| Error::Numeric(e.to_string()))?;
    let (lo, hi) = dom.bbox();
    let eps = 1e-12 * (hi - lo).norm().max(1.0);

    // Entry points with their directions come from the lines hitting the window.
    let mut births: Vec<(Vec2, Vec2)> = sample_poisson_lines(w, lambda, &DirectionRose::Isotropic, &mut rng)?
        .iter()
        .filter_map(|l| {
            let (p, q) = dom.chord(l)?;
            let (a, b) = if p.x <= q.x { (p, q) } else { (q, p) };
            let d = b - a;
            (d.x > 0.0).then(|| (a, d / d.norm()))
        })
        .collect();
    births.sort_by(|a, b| a.0.x.total_cmp(&b.0.x));

    let mut net = Network::with_boundary(&dom);
    let mut parts: Vec<Particle> = Vec::new();
    let spawn = |net: &mut Network, parts: &mut Vec<Particle>, origin: Vec2, dir: Vec2, v: usize, rng: &mut rand_chacha::ChaCha8Rng| {
        let seg = net.segment();
        net.attach(seg, 0.0, v);
        let exit = exit_time(&dom, origin, dir);
        let next_branch = branch_len.sample(rng);
        parts.push(Particle { origin, dir, seg, exit, next_branch, alive: true });
    };

    let mut next_birth = 0;
    let mut now = f64::NEG_INFINITY;
    let (mut n_branch, mut n_collide) = (0usize, 0usize);
    loop {
        let mut best: Option<(f64, Kind)> = births.get(next_birth).map(|b| (b.0.x, Kind::Birth(next_birth)));
        let mut consider = |x: f64, k: Kind| {
            if best.is_none_or(|(bx, _)| x < bx) {
                best = Some((x, k));
            }
        };
        let alive: Vec<usize> = (0..parts.len()).filter(|&k| parts[k].alive).collect();
        for &k in &alive {
            let p = &parts[k];
            if p.next_branch < p.exit {
                consider(p.at(p.next_branch).x, Kind::Branch(k));
            } else {
                consider(p.at(p.exit).x, Kind::Exit(k));
            }
        }
        for (ai, &a) in alive.iter().enumerate() {
            for &b in &alive[ai + 1..] {
                let (pa, pb) = (&parts[a], &parts[b]);
                let Some((sa, sb)) = ray_meet(pa.origin, pa.dir, pb.origin, pb.dir) else { continue };
                if sa <= 0.0 || sb <= 0.0 || sa > pa.exit || sb > pb.exit {
                    continue;
                }
                let x = pa.at(sa).x;
                if x > now + eps {
                    consider(x, Kind::Collide(a, b));
                }
            }
        }
        let Some((x, kind)) = best else { break };
        now = x;
        match kind {
            Kind::Birth(i) => {
                let (o, d) = births[i];
                next_birth += 1;
                let v = net.point(o);
                net.attach_to_boundary(v);
                spawn(&mut net, &mut parts, o, d, v, &mut rng);
            }
            Kind::Exit(k) => {
                let p = &mut parts[k];
                p.alive = false;
                let v = net.point(p.at(p.exit));
                net.attach(p.seg, p.exit, v);
                net.attach_to_boundary(v);
            }
            Kind::Branch(k) => {
                n_branch += 1;
                let (s, seg, pdir) = (parts[k].next_branch, parts[k].seg, parts[k].dir);
                let o = parts[k].at(s);
                parts[k].next_branch = s + branch_len.sample(&mut rng);
                let v = net.point(o);
                net.attach(seg, s, v);
                // Lines through a point of the trajectory cross it with density |sin| of the angle.
                let d = loop {
                    let phi = rng.random::<f64>() * PI;
                    let u = Vec2::from_angle(phi);
                    if rng.random::<f64>() < pdir.cross(u).abs() && u.x != 0.0 {
                        break rightward(u);
                    }
                };
                spawn(&mut net, &mut parts, o, d, v, &mut rng);
            }
            Kind::Collide(a, b) => {
                n_collide += 1;
                let (dead, live) = if rng.random::<bool>() { (a, b) } else { (b, a) };
                let sd = parts[dead].arc_at(x);
                let sl = parts[live].arc_at(x);
                let pt = parts[dead].at(sd);
                parts[dead].alive = false;
                let v = net.point(pt);
                net.attach(parts[dead].seg, sd, v);
                net.attach(parts[live].seg, sl, v);
            }
        }
    }
    let cells = net.cells();
    let mut t = PlanarTessellation::from_cells("acs", w.clone(), cells);
    t.diagnostics.insert("particles".into(), parts.len() as f64);
    t.diagnostics.insert("branchings".into(), n_branch as f64);
    t.diagnostics.insert("collisions".into(), n_collide as f64);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{VertexKind, DEFAULT_TOL_ANGLE};

    #[test]
    fn small_intensity_is_mostly_whole_window() {
        let t = acs(&Window::unit_square(), 1e-6, Seed::new(1)).unwrap();
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn t_vertices_and_partition() {
        for s in 0..5 {
            let t = acs(&Window::square(3.0, Default::default()).unwrap(), 6.0, Seed::new(s)).unwrap();
            assert!(t.partition_error() < 1e-9);
            let kinds: Vec<_> = t.lattice.interior_vertices().map(|v| t.lattice.classify(v, DEFAULT_TOL_ANGLE)).collect();
            assert!(kinds.iter().all(|k| *k == Some(VertexKind::T)), "{kinds:?}");
            assert!(t.len() > 5);
        }
    }

    #[test]
    fn segments_move_rightward() {
        let t = acs(&Window::unit_square(), 8.0, Seed::new(4)).unwrap();
        for e in t.lattice.interior_edges() {
            let (a, b) = t.lattice.edge_segment[e];
            assert!((a.x - b.x).abs() > 0.0 || (a.y - b.y).abs() > 0.0);
        }
    }
}
