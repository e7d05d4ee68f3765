use bazverify::caratheodory::{brute_force_sup, lemma1_bound, lemma3_bound, sample_point, GridSpec};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn random_draws_are_admissible() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..100_000 {
        let p = sample_point(rng.gen(), rng.gen_range(0.0..7.0), rng.gen(), rng.gen_range(0.0..7.0)).unwrap();
        assert!(p.is_admissible(1e-12), "{p:?}");
    }
}

#[test]
fn grid_supremum_matches_lemma_for_real_v() {
    let grid = GridSpec::uniform(24).unwrap();
    for v in [-0.75, 0.2, 0.9, 1.5] {
        let sup = brute_force_sup(|p| (p.c2 - v * p.c1 * p.c1).norm(), &grid);
        assert!(sup.value <= lemma1_bound(v) + 1e-9);
        assert!(sup.value >= lemma1_bound(v) - 0.05, "v={v} sup={}", sup.value);
        assert!(sup.witness.is_admissible(1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lemma3_holds_pointwise(
        rho in 0.0..=1.0f64, alpha in 0.0..6.3f64, tau in 0.0..=1.0f64, beta in 0.0..6.3f64,
        vr in -3.0..3.0f64, vi in -3.0..3.0f64,
    ) {
        let p = sample_point(rho, alpha, tau, beta).unwrap();
        let v = Complex64::new(vr, vi);
        prop_assert!((p.c2 - v * p.c1 * p.c1).norm() <= lemma3_bound(v) + 1e-12);
        prop_assert!(p.c1.norm() <= 2.0 + 1e-12 && p.c2.norm() <= 2.0 + 1e-12);
    }

    #[test]
    fn lemma1_agrees_with_lemma3_on_reals(v in -5.0..5.0f64) {
        prop_assert!((lemma1_bound(v) - lemma3_bound(Complex64::new(v, 0.0))).abs() < 1e-12);
    }
}
