//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p tessera-cli --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::process::Command;

use rayon::prelude::*;
use tessera::characteristics::{
    estimate_planar, estimate_spatial, ks_statistic, mean_se, oracle_johnson_mehl_mu, oracle_poisson_line,
    oracle_poisson_voronoi, paired_sign_test, sample_pdt_typical_cell, EstimateOptions, Reference, Report,
};
use tessera::distance::{delaunay, laguerre, raster_assign, rasterize, label_agreement, voronoi, voronoi3, RasterModel};
use tessera::division::{acs, cell_division, stit, DivisionConfig, DivisionRule, LifetimeRule, StopRule};
use tessera::geom::{CentroidRule, ConvexPolygon, ConvexPolyhedron, DirectionRose, EdgeMode, Vector, VertexKind, Window, DEFAULT_TOL_ANGLE};
use tessera::hyperplane::poisson_line_tessellation;
use tessera::process::{attach_marks, sample_poisson, MarkDistribution, MarkKind, Seed};
use tessera::tess::PlanarTessellation;

fn verdict(n: u32, pass: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

fn rel(est: f64, target: f64) -> f64 {
    (est - target).abs() / target.abs()
}

fn torus() -> Window<ConvexPolygon> {
    Window::new(ConvexPolygon::unit_square(), EdgeMode::Periodic).unwrap()
}

fn pv2(seed: Seed) -> PlanarTessellation {
    let w = torus();
    let p = sample_poisson(&w, 100.0, &mut seed.rng(0, "points")).unwrap();
    voronoi(&p, &w).unwrap()
}

fn reports(n: usize, f: impl Fn(usize) -> Report + Sync + Send) -> Report {
    let rs: Vec<Report> = (0..n).into_par_iter().map(f).collect();
    Report::aggregate(&rs).unwrap()
}

#[test]
fn criterion_01_poisson_voronoi_mean_values() {
    let opts = EstimateOptions::default();
    let seed = Seed::new(101);
    let agg = reports(300, |i| estimate_planar(&pv2(seed.derive(i as u64, "rep")), &opts).unwrap());
    let o = oracle_poisson_voronoi(100.0, 2).unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for k in ["gamma0", "gamma1", "gamma2", "L1", "P2", "A2"] {
        let (e, se, t) = (agg.get(k).unwrap(), agg.se_of(k).unwrap(), o.get(k).unwrap());
        let z = (e - t) / se;
        ok &= z.abs() < 4.0 && rel(e, t) < 0.03;
        detail.push(format!("{k}={e:.5} (oracle {t:.5}, z={z:+.2}, rel={:.4})", rel(e, t)));
    }
    verdict(1, ok, detail.join("; "));
}

#[test]
fn criterion_02_torus_exactness() {
    let seed = Seed::new(102);
    let bad: Vec<String> = (0..300)
        .into_par_iter()
        .filter_map(|i| {
            let t = pv2(seed.derive(i as u64, "rep"));
            let l = &t.lattice;
            let (v, e, f) = (l.interior_vertices().count(), l.interior_edges().count(), t.cells.len());
            let ok = v + f == e && v == 2 * f && e == 3 * f && v == l.vertices.len() && e == l.edges.len();
            (!ok).then(|| format!("rep {i}: V={v} E={e} F={f}"))
        })
        .collect();
    verdict(2, bad.is_empty(), format!("300 realizations, {} violating V-E+F=0, V=2F, E=3F {:?}", bad.len(), bad.first()));
}

#[test]
fn criterion_03_poisson_voronoi_3d() {
    let w = Window::new(ConvexPolyhedron::unit_cube(), EdgeMode::Plus { margin: 0.3 }).unwrap();
    let opts = EstimateOptions::default();
    let seed = Seed::new(103);
    let agg = reports(100, |i| {
        let s = seed.derive(i as u64, "rep");
        let p = sample_poisson(&w, 100.0, &mut s.rng(0, "points")).unwrap();
        estimate_spatial(&voronoi3(&p, &w).unwrap(), &opts).unwrap()
    });
    let l = 100.0f64;
    let targets = [("mu1", 5.832 * l.powf(2.0 / 3.0)), ("mu2", 2.910 * l.powf(1.0 / 3.0)), ("N30", 27.07)];
    let mut ok = true;
    let mut detail = Vec::new();
    for (k, t) in targets {
        let e = agg.get(k).unwrap();
        ok &= rel(e, t) < 0.05;
        detail.push(format!("{k}={e:.4} vs {t:.4} (rel {:.4})", rel(e, t)));
    }
    verdict(3, ok, detail.join("; "));
}

#[test]
fn criterion_04_poisson_line_tessellation() {
    let lambda = PI;
    let w = Window::square(10.0, EdgeMode::None).unwrap();
    let opts = EstimateOptions::default();
    let seed = Seed::new(104);
    let rs: Vec<(Report, bool)> = (0..500)
        .into_par_iter()
        .map(|i| {
            let t = poisson_line_tessellation(&w, lambda, &DirectionRose::Isotropic, &mut seed.rng(i as u64, "lines")).unwrap();
            let l = &t.lattice;
            let all_x = l.interior_vertices().all(|v| l.classify(v, DEFAULT_TOL_ANGLE) == Some(VertexKind::X));
            (estimate_planar(&t, &opts).unwrap(), all_x)
        })
        .collect();
    let all_x = rs.iter().all(|r| r.1);
    let agg = Report::aggregate(&rs.into_iter().map(|r| r.0).collect::<Vec<_>>()).unwrap();
    let o = oracle_poisson_line(lambda).unwrap();
    let mut ok = all_x;
    let mut detail = vec![format!("all interior vertices X: {all_x}")];
    for k in ["L1", "A2", "gamma0"] {
        let (e, t) = (agg.get(k).unwrap(), o.get(k).unwrap());
        ok &= rel(e, t) < 0.03;
        detail.push(format!("{k}={e:.5} vs {t:.5} (rel {:.4})", rel(e, t)));
    }
    verdict(4, ok, detail.join("; "));
}

fn centroid_areas(t: &PlanarTessellation, r: &Reference<tessera::geom::Vec2>) -> Vec<f64> {
    let rule = CentroidRule::GravityCenter;
    t.cells.iter().filter(|c| r.contains(rule.polygon(c))).map(|c| c.area()).collect()
}

#[test]
fn criterion_05_poisson_delaunay() {
    let lambda = 100.0;
    let seed = Seed::new(105);
    let w = torus();
    let mut exact = true;
    let mut simulated = Vec::new();
    let mut i = 0u64;
    while simulated.len() < 2000 {
        let p = sample_poisson(&w, lambda, &mut seed.rng(i, "points")).unwrap();
        let t = delaunay(&p, &w).unwrap();
        let l = &t.lattice;
        exact &= 2 * l.interior_vertices().count() == t.cells.len();
        simulated.extend(t.cells.iter().map(|c| c.area()));
        i += 1;
    }
    simulated.truncate(2000);
    let mut rng = seed.rng(0, "direct");
    let direct: Vec<f64> = (0..100_000).map(|_| sample_pdt_typical_cell(lambda, &mut rng).unwrap().area()).collect();
    let (m, _) = mean_se(&direct);
    let ks = ks_statistic(&direct[..2000], &simulated);
    let ok = exact && rel(m, 1.0 / (2.0 * lambda)) < 0.02 && ks < 0.05;
    verdict(
        5,
        ok,
        format!(
            "gamma2/gamma0 = 2 on {i} tori: {exact}; direct mean area {m:.6} vs {:.6} (rel {:.4}); KS {ks:.4}",
            1.0 / (2.0 * lambda),
            rel(m, 1.0 / (2.0 * lambda))
        ),
    );
}

#[test]
fn criterion_06_stit() {
    let a = 20.0;
    let w = Window::unit_square();
    let opts = EstimateOptions::default();
    let seed = Seed::new(106);
    let rs: Vec<(Report, bool)> = (0..300)
        .into_par_iter()
        .map(|i| {
            let t = stit(&w, a, &DirectionRose::Isotropic, seed.derive(i as u64, "stit")).unwrap();
            let l = &t.lattice;
            let all_t = l.interior_vertices().all(|v| l.classify(v, DEFAULT_TOL_ANGLE) == Some(VertexKind::T));
            (estimate_planar(&t, &opts).unwrap(), all_t)
        })
        .collect();
    let all_t = rs.iter().all(|r| r.1);
    let agg = Report::aggregate(&rs.into_iter().map(|r| r.0).collect::<Vec<_>>()).unwrap();
    let mu1 = agg.get("mu1").unwrap();

    let r = Reference::of(&w, opts.interior_fraction);
    let (mut s_areas, mut p_areas) = (Vec::new(), Vec::new());
    let mut k = 0u64;
    while s_areas.len() < 2000 {
        s_areas.extend(centroid_areas(&stit(&w, a, &DirectionRose::Isotropic, seed.derive(k, "ks-stit")).unwrap(), &r));
        k += 1;
    }
    let mut k = 0u64;
    while p_areas.len() < 2000 {
        let t = poisson_line_tessellation(&w, a, &DirectionRose::Isotropic, &mut seed.rng(k, "ks-plt")).unwrap();
        p_areas.extend(centroid_areas(&t, &r));
        k += 1;
    }
    s_areas.truncate(2000);
    p_areas.truncate(2000);
    let ks = ks_statistic(&s_areas, &p_areas);
    let ok = (19.4..=20.6).contains(&mu1) && all_t && ks < 0.05;
    verdict(6, ok, format!("mu1={mu1:.4} (se {:.4}); all interior vertices T: {all_t}; KS {ks:.4}", agg.se_of("mu1").unwrap()));
}

#[test]
fn criterion_07_degenerations() {
    let seed = Seed::new(107);
    let w = Window::unit_square();
    let p = sample_poisson(&w, 100.0, &mut seed.rng(0, "points")).unwrap();
    let v = voronoi(&p, &w).unwrap();
    let pc = attach_marks(p.clone(), &MarkDistribution::Constant { value: 0.03 }, MarkKind::Radius, &mut seed.rng(0, "r")).unwrap();
    let lg = laguerre(&pc, &w).unwrap();
    let mut max_dev = 0.0f64;
    let mut same_shape = v.cells.len() == lg.cells.len() && v.cell_generator == lg.cell_generator;
    for (a, b) in v.cells.iter().zip(&lg.cells) {
        same_shape &= a.len() == b.len();
        for (x, y) in a.vertices().iter().zip(b.vertices()) {
            max_dev = max_dev.max((*x - *y).norm());
        }
    }
    let pr = attach_marks(p, &MarkDistribution::Uniform { a: 0.0, b: 0.06 }, MarkKind::Radius, &mut seed.rng(0, "radii")).unwrap();
    let exact = rasterize(&laguerre(&pr, &w).unwrap(), 1024);
    let mut pg = pr.clone();
    pg.marks.weight = Some(pr.marks.radius.as_ref().unwrap().iter().map(|r| r * r).collect());
    pg.marks.matrix = Some(vec![vec![1.0, 0.0, 0.0, 1.0]; pg.len()]);
    let gbpd = raster_assign(&pg, RasterModel::Gbpd, 1024, &w).unwrap();
    let agree = label_agreement(&exact, &gbpd);
    let ok = same_shape && max_dev <= 1e-9 && agree >= 0.999;
    verdict(7, ok, format!("Laguerre(const)=Voronoi: same cells {same_shape}, max vertex deviation {max_dev:.2e}; GBPD(I, r^2) raster agreement {agree:.6}"));
}

#[test]
fn criterion_08_johnson_mehl_oracle() {
    let mut worst = 0.0f64;
    for lambda in [1.0, 10.0, 100.0, 1000.0] {
        let v = oracle_johnson_mehl_mu(lambda, &MarkDistribution::Constant { value: 0.0 }, 2, 1).unwrap();
        worst = worst.max((v - 2.0 * f64::sqrt(lambda)).abs());
    }
    verdict(8, worst < 1e-6, format!("max |mu1 - 2 sqrt(lambda)| over lambda in {{1,10,100,1000}}: {worst:.2e}"));
}

#[test]
fn criterion_09_acs() {
    let lambda = PI;
    let w = Window::square(10.0, EdgeMode::None).unwrap();
    let opts = EstimateOptions::default();
    let seed = Seed::new(109);
    let agg = reports(500, |i| estimate_planar(&acs(&w, lambda, seed.derive(i as u64, "acs")).unwrap(), &opts).unwrap());
    let target = oracle_poisson_line(lambda).unwrap().get("A2").unwrap();
    let a2 = agg.get("A2").unwrap();
    verdict(9, rel(a2, target) < 0.05, format!("mean cell area {a2:.5} (se {:.5}) vs {target:.5} (rel {:.4})", agg.se_of("A2").unwrap(), rel(a2, target)));
}

#[test]
fn criterion_10_zero_cell() {
    let seed = Seed::new(110);
    let pairs: Vec<(f64, f64)> = (0..1000)
        .into_par_iter()
        .map(|i| {
            let t = pv2(seed.derive(i as u64, "rep"));
            let z = t.zero_cell(tessera::geom::vec2(0.5, 0.5)).unwrap();
            (t.cells[z].area(), t.total_area() / t.cells.len() as f64)
        })
        .collect();
    let (zs, ts): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let (wins, n, p) = paired_sign_test(&zs, &ts);
    let ratio = mean_se(&zs).0 / mean_se(&ts).0;
    verdict(10, p < 1e-3, format!("zero cell larger in {wins}/{n} pairs, sign-test p={p:.3e}, mean ratio {ratio:.3}"));
}

fn division_cells(lifetime: LifetimeRule, division: DivisionRule, seed: Seed) -> Vec<ConvexPolygon> {
    let cfg = DivisionConfig { lifetime, division, asa_min_angle: 0.0, rose: DirectionRose::Isotropic, stop: StopRule::Cells { n: 50 } };
    cell_division(&Window::unit_square(), &cfg, seed).unwrap().cells
}

fn cv(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)).sqrt() / m
}

#[test]
fn criterion_11_division_variants() {
    let seed = Seed::new(111);
    let rows: Vec<[f64; 4]> = (0..100)
        .into_par_iter()
        .map(|i| {
            let s = seed.derive(i as u64, "seed");
            let area = |c: &Vec<ConvexPolygon>| c.iter().map(|x| x.area()).collect::<Vec<_>>();
            let rd = |c: &Vec<ConvexPolygon>| c.iter().map(|x| x.roundness()).sum::<f64>() / c.len() as f64;
            let la = division_cells(LifetimeRule::LArea, DivisionRule::DStit, s);
            let ls = division_cells(LifetimeRule::LStit, DivisionRule::DStit, s);
            let dr = division_cells(LifetimeRule::LStit, DivisionRule::DRdssq, s);
            [cv(&area(&la)), cv(&area(&ls)), rd(&dr), rd(&ls)]
        })
        .collect();
    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
    let (w1, n1, p1) = paired_sign_test(&col(1), &col(0));
    let (w2, n2, p2) = paired_sign_test(&col(2), &col(3));
    verdict(
        11,
        p1 < 0.01 && p2 < 0.01,
        format!("50 cells, 100 seeds: CV(area) L_AREA < L_STIT in {w1}/{n1} (p={p1:.2e}); mean RD D_RDSSQ > D_STIT in {w2}/{n2} (p={p2:.2e})"),
    );
}

#[test]
fn criterion_12_pipeline_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_tessera"))
            .args(["validate", "--model", "pv2", "--reps", "40", "--seed", "12", "--threads", threads, "--out"])
            .arg(&out)
            .status()
            .unwrap();
        (status.code(), std::fs::read(&out).unwrap())
    };
    let a = run("1", "a.csv");
    let b = run("1", "b.csv");
    let c = run("8", "c.csv");
    let ok = a.0 == Some(0) && a == b && a == c;
    verdict(12, ok, format!("validate exit codes {:?}/{:?}/{:?}; runs identical: {} (threads 1 vs 1), {} (threads 1 vs 8)", a.0, b.0, c.0, a.1 == b.1, a.1 == c.1));
}
