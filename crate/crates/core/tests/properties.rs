//! Property-based invariants across the kernel and counting layers.

use proptest::prelude::*;

use coexist_core::interference::{
    chi_avg, chi_exact, fwm_count, fwm_count_brute, omega_sprs, peak_length, Direction,
    PhaseMismatch,
};
use coexist_core::qkd::{bb84_skr, binary_entropy, qber, ChannelCondition, DvReceiverParams};

proptest! {
    #[test]
    fn fwm_count_closed_form_equals_enumeration(n in 1u32..=48, i in -48i64..=96) {
        prop_assert_eq!(fwm_count(n, i), fwm_count_brute(n, i));
    }

    #[test]
    fn omega_forward_nonnegative_and_peaked(
        ai in 1e-5f64..3e-4,
        ah in 1e-5f64..3e-4,
        l in 1.0f64..2e5,
    ) {
        let v = omega_sprs(ai, ah, l, Direction::Forward);
        prop_assert!(v >= 0.0);
        // never exceeds the value at the analytic peak
        let l_pk = peak_length(ai, ah);
        let peak = omega_sprs(ai, ah, l_pk, Direction::Forward);
        prop_assert!(v <= peak * (1.0 + 1e-9));
    }

    #[test]
    fn omega_backward_monotone_saturating(
        ai in 1e-5f64..3e-4,
        ah in 1e-5f64..3e-4,
        l in 1.0f64..2e5,
    ) {
        let v = omega_sprs(ai, ah, l, Direction::Backward);
        let v2 = omega_sprs(ai, ah, 2.0 * l, Direction::Backward);
        prop_assert!(v >= 0.0);
        prop_assert!(v2 >= v);
        prop_assert!(v <= 1.0 / (ai + ah) + 1e-12);
    }

    #[test]
    fn chi_kernels_nonnegative_and_bounded(
        da in -5e-4f64..-1e-6,
        db in -1e-2f64..1e-2,
        ai in 1e-5f64..3e-4,
        l in 0.0f64..2e5,
        zeta in 1.0f64..3.0,
    ) {
        let pm = PhaseMismatch { delta_alpha: da, delta_beta: db };
        for degenerate in [false, true] {
            let ex = chi_exact(pm, ai, l, zeta, degenerate);
            let av = chi_avg(pm, ai, l, zeta, degenerate);
            prop_assert!(ex >= 0.0);
            prop_assert!(av >= 0.0);
            let factor = if degenerate { zeta } else { 4.0 };
            let bound = factor * 2.0 * (0.5 * da * l).exp() * (-ai * l).exp()
                / (da * da + 4.0 * db * db);
            // subtraction of near-equal kernels leaves ulp-scale noise
            let slack = 1e-12 * (av + ex);
            prop_assert!((av - ex).abs() <= bound * (1.0 + 1e-9) + slack);
        }
    }

    #[test]
    fn chi_avg_non_increasing_in_spacing(
        mismatch_idx in 1i64..64,
        l in 1e3f64..1e5,
    ) {
        // fixed index mismatch, spacing swept over [1, 200] GHz
        let ai = 4.6e-5;
        let da = -2.0 * ai;
        let beta2 = -2.3e-26;
        let mut last = f64::INFINITY;
        for step in 0..40 {
            let df = 1e9 + (200e9 - 1e9) * step as f64 / 39.0;
            let db = 2.0 * std::f64::consts::PI.powi(2) * beta2 * mismatch_idx as f64 * df * df;
            let v = chi_avg(PhaseMismatch { delta_alpha: da, delta_beta: db }, ai, l, 2.0, false);
            prop_assert!(v <= last * (1.0 + 1e-12));
            last = v;
        }
    }

    #[test]
    fn bb84_monotone_in_noise_and_transmittance(
        s1 in 0.0f64..1e-20,
        s2 in 0.0f64..1e-20,
        t1 in 0.01f64..1.0,
        t2 in 0.01f64..1.0,
    ) {
        let dv = DvReceiverParams::default();
        let f = 200e12;
        let cond = |s, t| ChannelCondition { transmittance: t, noise_psd_w_per_hz: s, frequency_hz: f };
        let (s_lo, s_hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        let q_lo = qber(&cond(s_lo, t1), &dv).unwrap();
        let q_hi = qber(&cond(s_hi, t1), &dv).unwrap();
        prop_assert!(bb84_skr(q_hi, t1) <= bb84_skr(q_lo, t1) + 1e-15);
        let (t_lo, t_hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let q_at = |t| qber(&cond(s_lo, t), &dv).unwrap();
        prop_assert!(bb84_skr(q_at(t_hi), t_hi) + 1e-15 >= bb84_skr(q_at(t_lo), t_lo));
    }

    #[test]
    fn entropy_symmetric_and_bounded(p in 0.0f64..=1.0) {
        let h = binary_entropy(p);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&h));
        prop_assert!((h - binary_entropy(1.0 - p)).abs() < 1e-12);
    }
}
