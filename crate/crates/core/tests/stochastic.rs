use std::f64::consts::PI;

use rayon::prelude::*;
use tessera::characteristics::{
    estimate_planar, oracle_poisson_delaunay, oracle_poisson_line, oracle_poisson_voronoi, oracle_stit, EstimateOptions,
    Oracle, Report,
};
use tessera::division::{iterate, stit, IterateMode};
use tessera::geom::{DirectionRose, EdgeMode, Window};
use tessera::hyperplane::poisson_line_tessellation;
use tessera::process::Seed;

fn within(r: &Report, key: &str, target: f64, k: f64) {
    let (m, se) = (r.get(key).unwrap(), r.se_of(key).unwrap());
    assert!((m - target).abs() <= k * se, "{key}: {m} ± {se} vs {target}");
}

#[test]
fn nested_stit_is_stit() {
    let a = 8.0;
    let w = Window::unit_square();
    let rs: Vec<Report> = (0..300u64)
        .into_par_iter()
        .map(|i| {
            let s = Seed::new(71).derive(i, "rep");
            let frame = stit(&w, a / 2.0, &DirectionRose::Isotropic, s.derive(0, "frame")).unwrap();
            let comp = |cw: &Window<_>, cs: Seed| stit(cw, a / 2.0, &DirectionRose::Isotropic, cs);
            let t = iterate(&frame, &comp, IterateMode::Nest, 1.0, s.derive(1, "nest")).unwrap();
            estimate_planar(&t, &EstimateOptions::default()).unwrap()
        })
        .collect();
    let r = Report::aggregate(&rs).unwrap();
    let o = oracle_stit(a).unwrap();
    within(&r, "mu1", a, 4.0);
    within(&r, "gamma2_ml", o.get("gamma2").unwrap(), 4.0);
}

#[test]
fn weighted_cell_count_is_unbiased_in_small_windows() {
    let w = Window::square(4.0, EdgeMode::None).unwrap();
    let rs: Vec<Report> = (0..600u64)
        .into_par_iter()
        .map(|i| {
            let t = poisson_line_tessellation(&w, PI, &DirectionRose::Isotropic, &mut Seed::new(12).rng(i, "lines")).unwrap();
            estimate_planar(&t, &EstimateOptions::default()).unwrap()
        })
        .collect();
    within(&Report::aggregate(&rs).unwrap(), "gamma2_ml", PI, 4.0);
}

fn check_mean_value_relations(o: &Oracle) {
    let g = |k: &str| o.get(k).unwrap();
    assert!((g("gamma0") - g("gamma1") + g("gamma2")).abs() < 1e-9 * g("gamma1"), "{}", o.model);
    assert!((g("A2") * g("gamma2") - 1.0).abs() < 1e-9, "{}", o.model);
    assert!((g("P2") * g("gamma2") - 2.0 * g("mu1")).abs() < 1e-9 * g("mu1"), "{}", o.model);
}

#[test]
fn planar_oracles_are_consistent() {
    for lambda in [0.5, 1.0, 37.0] {
        check_mean_value_relations(&oracle_poisson_voronoi(lambda, 2).unwrap());
        check_mean_value_relations(&oracle_poisson_line(lambda).unwrap());
        check_mean_value_relations(&oracle_poisson_delaunay(lambda).unwrap());
        check_mean_value_relations(&oracle_stit(lambda).unwrap());
    }
    // PLT and STIT with matched line intensity share all first-order values except the vertex counts.
    let (l, s) = (oracle_poisson_line(5.0).unwrap(), oracle_stit(5.0).unwrap());
    for k in ["gamma2", "mu1", "A2", "P2"] {
        assert!((l.get(k).unwrap() - s.get(k).unwrap()).abs() < 1e-12, "{k}");
    }
}
