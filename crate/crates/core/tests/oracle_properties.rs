use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;

use spin_squeeze::frame::DEFAULT_FRAME_EPS;
use spin_squeeze::oracle::{
    frame_moments_oracle, min_transverse_variance, moments_oracle, spin_one,
};
use spin_squeeze::{
    build_superposition_state, compute_frame, squeeze_oracle, SqueezeMethod, SqueezeParams,
    StateVector,
};

fn params() -> impl Strategy<Value = SqueezeParams> {
    (0.0..=1.0f64, 0.0..=PI, -TAU..TAU).prop_map(|(b, m, n)| SqueezeParams::new(b, m, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn phase_period_leaves_results_unchanged(p in params()) {
        let shifted = SqueezeParams::new(p.beta(), p.mu(), p.nu() + TAU).unwrap();
        let a = squeeze_oracle(&p).unwrap();
        let b = squeeze_oracle(&shifted).unwrap();
        prop_assert!((a.xi2_std - b.xi2_std).abs() < 1e-9);
        prop_assert!((a.frame.r - b.frame.r).abs() < 1e-12);
        prop_assert!((a.concurrence - b.concurrence).abs() < 1e-12);
        prop_assert_eq!(a.frame_status, b.frame_status);
    }

    #[test]
    fn global_phase_is_unobservable(p in params(), g in 0.0..TAU) {
        let ops = spin_one();
        let s = build_superposition_state(&p);
        let phase = Complex64::from_polar(1.0, g);
        let t = StateVector::from_amplitudes(s.amplitudes().iter().map(|a| a * phase).collect()).unwrap();
        let (ma, mb) = (moments_oracle(&s, ops).unwrap(), moments_oracle(&t, ops).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((ma.table[i][j] - mb.table[i][j]).abs() < 1e-12);
            }
        }
        prop_assert!((ma.mean.length() - mb.mean.length()).abs() < 1e-12);
    }

    #[test]
    fn transverse_variances_obey_uncertainty_bound(p in params()) {
        let ops = spin_one();
        let s = build_superposition_state(&p);
        let mean = moments_oracle(&s, ops).unwrap().mean;
        let frame = compute_frame(&mean, DEFAULT_FRAME_EPS);
        prop_assume!(frame.has_transverse_plane());
        let fm = frame_moments_oracle(&s, &frame, ops).unwrap();
        // Transverse means vanish, so second moments are variances.
        prop_assert!(fm.jn1_sq * fm.jn2_sq >= 0.25 * frame.r * frame.r - 1e-12);
        let t = min_transverse_variance(&s, &frame, ops).unwrap();
        prop_assert!(t.lambda_min >= -1e-12);
        prop_assert!(t.lambda_min <= fm.jn1_sq.min(fm.jn2_sq) + 1e-12);
        prop_assert!((0.0..std::f64::consts::PI).contains(&t.chi_min));
    }

    #[test]
    fn result_fields_are_consistent(p in params()) {
        let r = squeeze_oracle(&p).unwrap();
        prop_assert!((r.xi2_literal - 2.0 * r.xi2_std).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&r.concurrence));
        prop_assert_eq!(r.chi_min.is_some(), r.method == SqueezeMethod::TransverseEigen);
        prop_assert_eq!(r.min_direction.is_some(), r.method == SqueezeMethod::AllDirections);
        prop_assert_eq!(r.frame_moments.is_some(), r.frame.has_transverse_plane());
    }
}
