use proptest::prelude::*;
use tessera::characteristics::{estimate_planar, ks_statistic, EstimateOptions, Reference};
use tessera::distance::voronoi;
use tessera::geom::{ConvexPolygon, EdgeMode, Window};
use tessera::io::{export_json, import_json, Meta};
use tessera::models::ModelSpec;
use tessera::process::{sample_poisson, Seed};

fn planar(lambda: f64, mode: EdgeMode, seed: u64) -> tessera::tess::PlanarTessellation {
    let w = Window::new(ConvexPolygon::unit_square(), mode).unwrap();
    let p = sample_poisson(&w, lambda, &mut Seed::new(seed).rng(0, "points")).unwrap();
    voronoi(&p, &w).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn torus_euler_and_partition(lambda in 5.0..80.0f64, seed in any::<u64>()) {
        let t = planar(lambda, EdgeMode::Periodic, seed);
        prop_assume!(t.len() >= 3);
        prop_assert!(t.partition_error() < 1e-9);
        let r = estimate_planar(&t, &EstimateOptions::default()).unwrap();
        let g = |k: &str| r.get(k).unwrap();
        prop_assert!((g("gamma0") - g("gamma1") + g("gamma2")).abs() < 1e-9 * g("gamma1"));
        prop_assert!((g("mu2") - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bounded_partition(lambda in 5.0..80.0f64, seed in any::<u64>()) {
        let t = planar(lambda, EdgeMode::None, seed);
        prop_assume!(!t.is_empty());
        prop_assert!(t.partition_error() < 1e-9);
        prop_assert!((t.total_area() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reference_clip_covers_reference(fraction in 0.2..1.0f64, seed in any::<u64>()) {
        let t = planar(30.0, EdgeMode::None, seed);
        prop_assume!(!t.is_empty());
        let r = Reference::of(&t.window, fraction);
        let mut covered = 0.0;
        for c in &t.cells {
            if let Some(k) = r.clip(c) {
                prop_assert!(k.area() <= c.area() + 1e-12);
                covered += k.area();
            }
        }
        prop_assert!((covered - r.content).abs() < 1e-9);
    }

    #[test]
    fn ks_is_a_distance(a in prop::collection::vec(-10.0..10.0f64, 1..60), b in prop::collection::vec(-10.0..10.0f64, 1..60)) {
        let d = ks_statistic(&a, &b);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!((d - ks_statistic(&b, &a)).abs() < 1e-12);
        prop_assert_eq!(ks_statistic(&a, &a), 0.0);
    }

    #[test]
    fn raster_json_roundtrip(seed in any::<u64>(), res in 16usize..48) {
        let spec: ModelSpec = serde_json::from_value(serde_json::json!(
            { "model": "raster", "lambda": 20.0, "engine": { "kind": "gbpd" }, "resolution": res }
        )).unwrap();
        let r = spec.generate(Seed::new(seed)).unwrap();
        let s = export_json(&r, &Meta { params: serde_json::Value::Null, seed: Some(seed) }).unwrap();
        let (back, meta) = import_json(&s).unwrap();
        prop_assert_eq!(back, r);
        prop_assert_eq!(meta.seed, Some(seed));
    }
}
