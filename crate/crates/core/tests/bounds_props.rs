use bazverify::bazilevic::ClassParams;
use bazverify::bounds::{
    conv_fs_complex, conv_fs_real, fs_complex, fs_real, fs_real_matching_knot, inverse_fs, sigma2_matching,
    Branch, FeketeSzegoInputs,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ClassParams> {
    (0.0..=1.0f64, 0.0..=1.0f64, 1.0..4.0f64).prop_map(|(t, k, x)| ClassParams::new(t, k, x).unwrap())
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn complex_bound_has_floor(p in params(), re in -10.0..10.0f64, im in -10.0..10.0f64) {
        let v = fs_complex(&p, Complex64::new(re, im));
        prop_assert!(v.value >= 1.0 / p.l() - 1e-15);
    }

    #[test]
    fn piecewise_continuous_at_sigma1(p in params()) {
        let s1 = fs_real(&p, 0.0).sigma1;
        let h = 1e-10 * s1.abs().max(1.0);
        prop_assert!((fs_real(&p, s1 - h).value - fs_real(&p, s1 + h).value).abs() < 1e-9);
    }

    #[test]
    fn matching_knot_agrees_with_complex_form_on_reals(p in params(), mu in -10.0..10.0f64) {
        let v = fs_real_matching_knot(&p, mu);
        prop_assert!(mu <= sigma2_matching(&p) || v.branch == Branch::AboveSigma2);
        prop_assert!((v.value - fs_complex(&p, real(mu)).value).abs() < 1e-12);
    }

    #[test]
    fn conv_real_scales_with_p3(p in params(), mu in -5.0..5.0f64, c in 0.1..10.0f64) {
        // p2^2 / p3 fixed, p3 scaled by c: knots unchanged, value divided by c
        let a = conv_fs_real(&FeketeSzegoInputs::new(p, real(mu)).with_convolution(1.0, 1.0)).unwrap();
        let b = conv_fs_real(&FeketeSzegoInputs::new(p, real(mu)).with_convolution(c.sqrt(), c)).unwrap();
        prop_assert!((a.sigma1 - b.sigma1).abs() < 1e-9 && (a.sigma2 - b.sigma2).abs() < 1e-9);
        prop_assert!((a.value / c - b.value).abs() < 1e-9 * a.value.abs().max(1.0));
        let _ = conv_fs_complex(&FeketeSzegoInputs::new(p, real(mu)).with_convolution(c.sqrt(), c)).unwrap();
    }

    #[test]
    fn inverse_fs_has_floor(p in params(), h in -5.0..5.0f64) {
        prop_assert!(inverse_fs(&p, real(h)) >= 1.0 / p.l() - 1e-15);
    }
}
