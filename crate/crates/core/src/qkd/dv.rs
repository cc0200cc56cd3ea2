//! Two-state BB84: QBER and asymptotic secret-key fraction.

use serde::{Deserialize, Serialize};

use crate::constants::PLANCK;
use crate::error::{Error, Result};

use super::ChannelCondition;

/// Discrete-variable receiver parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DvReceiverParams {
    /// Collection factor R_det = B_det tau_det (dimensionless).
    pub r_det: f64,
    /// Mean dark counts per detection window.
    pub dark_counts: f64,
    /// Receiver efficiency.
    pub eta_rx: f64,
}

impl Default for DvReceiverParams {
    fn default() -> Self {
        // R_det = 1, no dark counts, unit efficiency
        DvReceiverParams { r_det: 1.0, dark_counts: 0.0, eta_rx: 1.0 }
    }
}

impl DvReceiverParams {
    /// Build from explicit bandwidth/window values, checking consistency
    /// with `r_det` when both are given.
    pub fn from_detector(b_det_hz: f64, tau_det_s: f64) -> Self {
        DvReceiverParams { r_det: b_det_hz * tau_det_s, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_det < 0.0 || self.dark_counts < 0.0 {
            return Err(Error::Config("R_det and dark counts must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.eta_rx) || self.eta_rx == 0.0 {
            return Err(Error::Config("eta_RX must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Mean interference photons collected in one detection window:
/// N = P B_det tau_det / (B_ch h f).
pub fn mean_noise_photons(
    p_int_w: f64,
    b_det_hz: f64,
    tau_det_s: f64,
    b_ch_hz: f64,
    f_i_hz: f64,
) -> f64 {
    p_int_w * b_det_hz * tau_det_s / (b_ch_hz * PLANCK * f_i_hz)
}

/// QBER of the two-state protocol for the given channel condition,
/// including receiver efficiency and dark counts:
///
/// QBER = (eta N_int + N_dc) / (eta T + eta N_int + N_dc),
/// N_int = S_int R_det / (h f).
///
/// With zero dark counts and unit efficiency this reduces to
/// S R / (h f T + S R).
pub fn qber(cond: &ChannelCondition, dv: &DvReceiverParams) -> Result<f64> {
    if cond.transmittance <= 0.0 {
        return Err(Error::Domain {
            quantity: "transmittance",
            value: cond.transmittance,
            min: f64::MIN_POSITIVE,
            max: 1.0,
        });
    }
    let n_int = cond.noise_psd_w_per_hz * dv.r_det / (PLANCK * cond.frequency_hz);
    let noise = dv.eta_rx * n_int + dv.dark_counts;
    Ok(noise / (dv.eta_rx * cond.transmittance + noise))
}

/// Binary Shannon entropy, bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Asymptotic BB84 secret-key fraction r = (T/2)(1 - 2 H2(QBER)), clamped
/// at zero.
pub fn bb84_skr(qber: f64, transmittance: f64) -> f64 {
    bb84_skr_raw(qber, transmittance).max(0.0)
}

/// Unclamped BB84 rate for diagnostics.
pub fn bb84_skr_raw(qber: f64, transmittance: f64) -> f64 {
    0.5 * transmittance * (1.0 - 2.0 * binary_entropy(qber))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cond(s: f64, t: f64) -> ChannelCondition {
        ChannelCondition { transmittance: t, noise_psd_w_per_hz: s, frequency_hz: 193.4e12 }
    }

    #[test]
    fn noiseless_channel_has_zero_qber() {
        let q = qber(&cond(0.0, 0.5), &DvReceiverParams::default()).unwrap();
        assert_eq!(q, 0.0);
        assert_eq!(bb84_skr(q, 0.5), 0.25);
    }

    #[test]
    fn balanced_noise_gives_half() {
        let f = 193.4e12;
        let t = 0.3;
        let s = PLANCK * f * t; // S R = h f T with R = 1
        let q = qber(&cond(s, t), &DvReceiverParams::default()).unwrap();
        assert_relative_eq!(q, 0.5, max_relative = 1e-12);
        assert_eq!(bb84_skr(q, t), 0.0);
    }

    #[test]
    fn zero_transmittance_rejected() {
        assert!(qber(&cond(1e-22, 0.0), &DvReceiverParams::default()).is_err());
    }

    #[test]
    fn qber_monotone_in_noise() {
        let dv = DvReceiverParams::default();
        let mut last = 0.0;
        for k in 1..40 {
            let s = 1e-24 * k as f64;
            let q = qber(&cond(s, 0.2), &dv).unwrap();
            assert!(q > last);
            last = q;
        }
    }

    #[test]
    fn entropy_threshold_near_11_percent() {
        // bisect 1 - 2 H2(q) = 0
        let f = |q: f64| 1.0 - 2.0 * binary_entropy(q);
        let (mut lo, mut hi) = (0.01, 0.4);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        assert!((root - 0.1100).abs() < 5e-4, "threshold = {root}");
        // rate vanishes at the threshold
        assert!(bb84_skr_raw(root, 1.0).abs() < 1e-6);
        assert_eq!(bb84_skr(0.5, 1.0), 0.0);
    }

    #[test]
    fn dark_counts_and_efficiency() {
        let f = 193.4e12;
        let t = 0.3;
        // dark counts raise the QBER even with zero interference
        let dv = DvReceiverParams { r_det: 1.0, dark_counts: 0.01, eta_rx: 1.0 };
        let q = qber(&cond(0.0, t), &dv).unwrap();
        assert_relative_eq!(q, 0.01 / (t + 0.01), max_relative = 1e-12);
        // reducing eta makes dark counts relatively worse
        let dv2 = DvReceiverParams { eta_rx: 0.5, ..dv };
        assert!(qber(&cond(0.0, t), &dv2).unwrap() > q);
        let _ = f;
    }

    #[test]
    fn photon_counting() {
        let f = 200e12;
        let b_ch = 50e9;
        // P = h f B_ch / (B_det tau) makes exactly one photon per window
        let (b_det, tau) = (10e9, 0.5e-9);
        let p = PLANCK * f * b_ch / (b_det * tau);
        assert_relative_eq!(
            mean_noise_photons(p, b_det, tau, b_ch, f),
            1.0,
            max_relative = 1e-12
        );
        // doubling the window doubles the count
        assert_relative_eq!(
            mean_noise_photons(p, b_det, 2.0 * tau, b_ch, f),
            2.0,
            max_relative = 1e-12
        );
    }
}
