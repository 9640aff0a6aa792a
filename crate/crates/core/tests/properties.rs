use std::f64::consts::PI;

use cutproject::harmonic::{
    character_average, finite_autocorrelation, reflect_measure, theoretical_autocorrelation,
    van_hove_ratio, Reflection,
};
use cutproject::pointset::cut_model_set;
use cutproject::verify::{psf_lattice_check, wiener_identity_check};
use cutproject::{
    Boundary, Complex64, Gaussian, Interval, Measure, PointMass, Region, Scheme, Scheme32, Side,
    Weight, Weight32,
};
use proptest::prelude::*;

const TAU: f64 = 1.618_033_988_749_895;

fn fibonacci() -> Scheme {
    Scheme::new(
        1,
        1,
        1,
        vec![vec![1.0, TAU], vec![1.0, 1.0 - TAU]],
        vec![0, 0],
    )
    .unwrap()
}

fn interval(a: f64, b: f64) -> Weight {
    Weight::box_indicator(
        vec![Interval::new(a, b).unwrap()],
        None,
        1,
        Boundary::Closed,
    )
    .unwrap()
}

/// Diagonally dominant matrices are comfortably invertible.
fn matrix(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, n), n).prop_map(move |mut rows| {
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] += if row[i] >= 0.0 { n as f64 } else { -(n as f64) };
        }
        rows
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn duality_identities(rows in matrix(3), c in prop::collection::vec(-5i64..5, 3), n in 1u32..6) {
        let mut c = c;
        c[0] = 1; // keeps gcd(c, N) = 1
        let s = Scheme::new(2, 1, n, rows, c).unwrap();
        let dual = s.dual_lattice();
        let back = dual.base().inverse().unwrap().transpose();
        prop_assert!(back.max_abs_diff(s.basis()) <= 1e-12);
        prop_assert!((s.density() * dual.density() - 1.0).abs() <= 1e-12);
        prop_assert!(dual.annihilator_residual(&s) <= 1e-10);
    }

    #[test]
    fn finite_autocorrelation_is_positive_definite(a in -1.0f64..0.0, len in 0.2f64..1.5, n in 20.0f64..200.0, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let h = Weight::combination(vec![
            (Complex64::new(re, im), interval(a, a + len)),
            (Complex64::new(1.0, 0.0), Weight::tent(vec![0.4], None, 1).unwrap()),
        ]).unwrap();
        let s = fibonacci();
        let ps = cut_model_set(&s, &h, &Region::centered(1, n).unwrap()).unwrap();
        let fin = finite_autocorrelation(&ps, 6.0).unwrap();
        prop_assert!(fin.positive_definiteness_defect() <= 1e-12);
    }

    #[test]
    fn theoretical_autocorrelation_is_hermitian(a in -1.0f64..0.0, len in 0.2f64..1.5) {
        let fin = theoretical_autocorrelation(&fibonacci(), &interval(a, a + len), 8.0).unwrap();
        prop_assert!(fin.positive_definiteness_defect() <= 1e-12);
    }

    #[test]
    fn van_hove_ratio_decreases(r in 0.1f64..5.0, n in 0.1f64..100.0, d in 1usize..4) {
        let a = van_hove_ratio(d, r, n).unwrap();
        let b = van_hove_ratio(d, r, 2.0 * n).unwrap();
        prop_assert!(b < a);
    }

    #[test]
    fn reflections_are_involutions(locs in prop::collection::vec((-50i32..50, -3.0f64..3.0, -3.0f64..3.0), 0..20)) {
        let entries = locs.iter().map(|&(x, re, im)| PointMass { location: vec![x as f64 * 0.5], amplitude: Complex64::new(re, im) }).collect();
        let m = Measure::from_entries(Side::Direct, entries).unwrap();
        for how in [Reflection::Tilde, Reflection::Dagger] {
            prop_assert_eq!(&reflect_measure(&reflect_measure(&m, how), how), &m);
        }
    }

    #[test]
    fn model_sets_grow_with_the_window(a in -0.5f64..0.0, b in 0.0f64..0.5, grow in 0.0f64..0.5, n in 5.0f64..100.0) {
        let s = fibonacci();
        let (w_small, w_big) = (interval(a, b), interval(a - grow, b + grow));
        let region = Region::centered(1, n).unwrap();
        let small = cut_model_set(&s, &w_small, &region).unwrap();
        let big = cut_model_set(&s, &w_big, &region).unwrap();
        let bigger: std::collections::BTreeSet<Vec<i64>> = big.points().iter().map(|(p, _)| p.z.clone()).collect();
        prop_assert!(small.points().iter().all(|(p, _)| bigger.contains(&p.z)));
    }

    #[test]
    fn character_average_bound(chi in -3.0f64..3.0, t in -10.0f64..10.0, n in 0.5f64..100.0) {
        let v = character_average(&[chi], &Region::new(n, vec![t]).unwrap()).unwrap().norm();
        let bound = if chi == 0.0 { 1.0 } else { (1.0 / (PI * chi.abs() * n)).min(1.0) };
        prop_assert!(v <= bound + 1e-15);
    }

    #[test]
    fn wiener_identity_random_boxes(a in -1.0f64..0.0, len in 0.1f64..2.0, k in -6.0f64..6.0) {
        let r = wiener_identity_check(&interval(a, a + len), &[(vec![k], 0)], 1e-10).unwrap();
        prop_assert!(r.pass, "{:?}", r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lattice_psf_random_gaussians(w1 in 0.4f64..2.0, w2 in 0.4f64..2.0, c1 in -1.0f64..1.0, nu in -0.5f64..0.5) {
        let g = Gaussian::new(vec![w1, w2], vec![c1, 0.0], vec![nu, 0.0]).unwrap();
        let r = psf_lattice_check(&fibonacci(), &g, 1e-10).unwrap();
        prop_assert!(r.pass && r.residual <= 1e-10, "{:?}", r);
    }
}

#[test]
fn single_precision_instance() {
    let s = Scheme32::new(
        1,
        1,
        1,
        vec![vec![1.0, TAU as f32], vec![1.0, 1.0 - TAU as f32]],
        vec![0, 0],
    )
    .unwrap();
    let h = Weight32::box_indicator(
        vec![Interval::new(-0.5f32, 0.5).unwrap()],
        None,
        1,
        Boundary::Closed,
    )
    .unwrap();
    let ps = cut_model_set(&s, &h, &cutproject::Region32::centered(1, 100.0).unwrap()).unwrap();
    let estimate = ps.len() as f32 / 200.0;
    assert!((estimate - 0.447_213_6).abs() < 1e-2);
    assert!((s.density() - 0.447_213_6).abs() < 1e-6);
}
