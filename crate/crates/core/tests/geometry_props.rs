mod common;

use cavity_core::geometry::*;
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn reference_parameters() {
    let h = horwitz_params(&common::g0()).unwrap();
    assert!(rel(h.magnification, 4.791_287_847_477_92) < 1e-12);
    assert!(rel(h.fresnel_number, 4.0) < 1e-12);
    assert!(rel(h.chirp, 60.209_098_811_482_75) < 1e-12);
    let t20 = horwitz_params(&common::g0_t20()).unwrap();
    assert!(rel(t20.chirp, 20.0) < 1e-12);
}

#[test]
fn closed_form_matches_ray_trace_on_random_unstable_geometries() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let big_r = rng.gen_range(0.2..10.0);
        let r = rng.gen_range(0.01..0.95) * big_r;
        let l = rng.gen_range(0.01..0.99) * (big_r - r);
        let g = CavityGeometry::new(big_r, r, l, 1e-3 * l, 1e-6).unwrap();
        let closed = horwitz_params(&g).unwrap().magnification;
        let m = subcavity_roundtrip(&g).unwrap().half_trace();
        worst = worst.max(rel(closed, magnification_from_trace(m).unwrap()));
    }
    assert!(worst < 1e-9, "worst relative disagreement {worst:e}");
}

proptest! {
    #[test]
    fn ray_matrices_are_unimodular(
        l in 1e-3f64..5.0,
        big_r in 0.1f64..20.0,
        r in 0.01f64..10.0,
    ) {
        let half = AbcdMatrix::half_cavity(l, big_r);
        prop_assert_eq!(half.a, half.d);
        prop_assert!(half.is_unimodular());
        prop_assert!(abcd_convex_reflection(r).is_unimodular());
        prop_assert!((abcd_convex_reflection(r) * half).is_unimodular());
        prop_assert!((half * abcd_convex_reflection(r) * half).is_unimodular());
    }

    #[test]
    fn unstable_flag_agrees_with_half_trace(
        big_r in 0.2f64..10.0,
        rf in 0.01f64..0.95,
        lf in 0.001f64..0.999,
    ) {
        let r = rf * big_r;
        let l = lf * big_r;
        // Stay clear of the marginal point.
        prop_assume!((l - (big_r - r)).abs() > 1e-6 * big_r);
        let g = CavityGeometry::new(big_r, r, l, 1e-4, 1e-6).unwrap();
        let s = classify_stability(&g);
        prop_assert_eq!(s.subcavity_unstable, s.half_trace_m.abs() > 1.0);
        prop_assert_eq!(s.subcavity_stable, !s.subcavity_unstable);
    }
}
