use aniso::grid::{convolve, Geometry, GridField};
use aniso::martingale::{cond_exp, max_level};
use proptest::prelude::*;

fn field(dim: usize, cells: usize) -> impl Strategy<Value = GridField> {
    let g = Geometry::new(dim, 2.0, cells).unwrap();
    prop::collection::vec(-1.0f64..1.0, g.len()).prop_map(move |v| GridField::from_values(g, v).unwrap())
}

fn close(a: &GridField, b: &GridField, tol: f64) -> bool {
    a.values().iter().zip(b.values()).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(f in field(2, 16)) {
        let l2 = f.lp_norm(2.0).unwrap().powi(2);
        let energy = f.spectrum().energy();
        prop_assert!((l2 - energy).abs() <= 1e-10 * l2.max(1.0));
    }

    #[test]
    fn spectrum_roundtrip(f in field(3, 8)) {
        prop_assert!(close(&f.spectrum().inverse(), &f, 1e-12));
    }

    #[test]
    fn convolution_commutes((f, g) in (field(2, 16), field(2, 16))) {
        prop_assert!(close(&convolve(&f, &g).unwrap(), &convolve(&g, &f).unwrap(), 1e-10));
    }

    #[test]
    fn convolution_is_translation_covariant(f in field(2, 16), g in field(2, 16), s0 in -8i64..8, s1 in -8i64..8) {
        let shifted = convolve(&f.roll(&[s0, s1]), &g).unwrap();
        prop_assert!(close(&shifted, &convolve(&f, &g).unwrap().roll(&[s0, s1]), 1e-10));
    }

    #[test]
    fn conditional_expectation_is_a_projection(f in field(2, 16), m in 0usize..=4) {
        let e = cond_exp(&f, m).unwrap();
        prop_assert!(close(&cond_exp(&e, m).unwrap(), &e, 1e-12));
        prop_assert!((e.mean() - f.mean()).abs() < 1e-12);
    }

    #[test]
    fn conditional_expectation_tower(f in field(1, 64), m0 in 0usize..=6, m1 in 0usize..=6) {
        let (lo, hi) = (m0.min(m1), m0.max(m1));
        prop_assert!(hi <= max_level(f.geometry()));
        let nested = cond_exp(&cond_exp(&f, hi).unwrap(), lo).unwrap();
        prop_assert!(close(&nested, &cond_exp(&f, lo).unwrap(), 1e-12));
    }

    #[test]
    fn conditional_expectation_contracts_sup_norm(f in field(2, 16), m in 0usize..=4) {
        let e = cond_exp(&f, m).unwrap();
        prop_assert!(e.lp_norm(f64::INFINITY).unwrap() <= f.lp_norm(f64::INFINITY).unwrap() + 1e-15);
    }
}
