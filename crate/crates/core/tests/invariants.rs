//! Property-based invariants over randomly generated maps, points and
//! rationals: inversion round-trips, unit-determinant tangents, exact
//! continued-fraction reconstruction, and norm-estimate bracket sanity.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use hamlab::diophantine::ContinuedFraction;
use hamlab::grid::GridSpec;
use hamlab::maps::MapExpr;
use hamlab::norms;
use hamlab::phase_space::{circle_dist, Manifold, Point};

/// Closed-form annulus generators (no numerical flows: round-trips here are
/// exact up to rounding).
fn closed_form_map() -> impl Strategy<Value = MapExpr> {
    prop_oneof![
        (-2.0..2.0f64).prop_map(|alpha| MapExpr::Rotation {
            manifold: Manifold::Annulus,
            alpha,
        }),
        (-3.0..3.0f64).prop_map(|strength| MapExpr::Twist { strength }),
        Just(MapExpr::Linear {
            manifold: Manifold::Annulus,
            entries: [[2.0, 1.0], [1.0, 1.0]],
        }),
        Just(MapExpr::Identity {
            manifold: Manifold::Annulus,
        }),
    ]
}

fn composed_map() -> impl Strategy<Value = MapExpr> {
    proptest::collection::vec(closed_form_map(), 1..4).prop_map(MapExpr::compose)
}

fn annulus_point() -> impl Strategy<Value = Point> {
    (0.0..1.0f64, 0.05..0.95f64).prop_map(|(t, a)| Point::annulus(t, a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_round_trips(f in composed_map(), p in annulus_point()) {
        let q = f.evaluate(&p).unwrap();
        let back = f.clone().inverse().evaluate(&q).unwrap();
        prop_assert!(circle_dist(back.c[0], p.c[0]) < 1e-9);
        prop_assert!(circle_dist(back.c[1], p.c[1]) < 1e-9);
    }

    #[test]
    fn tangents_have_unit_determinant(f in composed_map(), p in annulus_point()) {
        prop_assert!(f.symplecticity_defect(&p).unwrap() < 1e-9);
    }

    #[test]
    fn iterate_matches_repeated_composition(f in closed_form_map(), p in annulus_point(), n in 1i64..6) {
        let it = f.clone().iterate(n).evaluate(&p).unwrap();
        let mut q = p.clone();
        for _ in 0..n {
            q = f.evaluate(&q).unwrap();
        }
        prop_assert!(circle_dist(it.c[0], q.c[0]) < 1e-9);
        prop_assert!(circle_dist(it.c[1], q.c[1]) < 1e-9);
    }

    #[test]
    fn rational_cf_reconstructs_exactly(num in 0i64..1000, den in 1i64..1000) {
        let r = BigRational::new(BigInt::from(num), BigInt::from(den));
        let cf = ContinuedFraction::from_rational(&r);
        let iv = cf.value_interval();
        prop_assert_eq!(iv.lo.clone(), r.clone());
        prop_assert_eq!(iv.hi, r);
    }

    #[test]
    fn rotation_c0_bracket_contains_truth(a in -0.5..0.5f64, b in -0.5..0.5f64) {
        let f = MapExpr::Rotation { manifold: Manifold::Annulus, alpha: a };
        let g = MapExpr::Rotation { manifold: Manifold::Annulus, alpha: b };
        let est = norms::c0_distance(&f, &g, &GridSpec::new(16, 4)).unwrap();
        let truth = circle_dist(a, b);
        prop_assert!(est.lower <= est.upper);
        // Rotations displace every point the same amount: the grid lower
        // bound is exact and the Lipschitz upper bound covers it.
        prop_assert!((est.lower - truth).abs() < 1e-12);
        prop_assert!(est.upper >= truth);
    }
}
