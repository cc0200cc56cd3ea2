//! Protocol-level quantities: QBER and excess noise from interference
//! power, and asymptotic secret-key rates for two-state BB84 and GMCS.

mod cv;
mod dv;
mod gaussian;

pub use cv::{
    eve_covariances, excess_noise_su, excess_noise_volts_sq, gmcs_skr_asymptotic,
    gmcs_skr_asymptotic_raw, gmcs_skr_finite, gmcs_skr_finite_raw, gmcs_skr_raw,
    mutual_information, receiver_penalty, shot_noise_variance, CvReceiverParams, Detection,
};
pub use dv::{
    bb84_skr, bb84_skr_raw, binary_entropy, mean_noise_photons, qber, DvReceiverParams,
};
pub use gaussian::{h2, holevo_bound, GaussianCm};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Channel condition seen by the quantum receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelCondition {
    /// End-to-end transmittance, (0, 1].
    pub transmittance: f64,
    /// Interference noise power spectral density at the quantum frequency,
    /// W/Hz.
    pub noise_psd_w_per_hz: f64,
    /// Quantum carrier frequency, Hz.
    pub frequency_hz: f64,
}

impl ChannelCondition {
    /// Build from a link: T = e^{-alpha L}.
    pub fn from_link(alpha_per_m: f64, length_m: f64, s_int: f64, f_i_hz: f64) -> Self {
        ChannelCondition {
            transmittance: (-alpha_per_m * length_m).exp(),
            noise_psd_w_per_hz: s_int,
            frequency_hz: f_i_hz,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.transmittance > 0.0 && self.transmittance <= 1.0) {
            return Err(Error::Config("transmittance must lie in (0, 1]".into()));
        }
        if self.noise_psd_w_per_hz < 0.0 {
            return Err(Error::Config("noise PSD must be non-negative".into()));
        }
        Ok(())
    }
}

/// Noise power spectral density of interference power `p_int_w` spread over
/// the slot bandwidth: S = P / B.
pub fn noise_psd(p_int_w: f64, b_ch_hz: f64) -> f64 {
    p_int_w / b_ch_hz
}
