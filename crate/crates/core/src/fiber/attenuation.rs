//! Parametric attenuation profile with OH- absorption peaks.
//!
//! alpha_dB(l) = R / l^4 + A_IR exp(-b_IR / l) + oh_scale * sum of Gaussian
//! peaks, with `l` in micrometres. The Rayleigh and infrared-edge
//! coefficients are calibrated so that alpha(1550) = 0.19 dB/km and
//! alpha(1310) = 0.32 dB/km with the loss minimum at 1562 nm, standing in
//! for the analytic profile the underlying model cites externally.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::db_per_km_to_nat_per_m;

/// Supported wavelength range for attenuation queries, nm.
pub const ATT_LAMBDA_MIN_NM: f64 = 1260.0;
pub const ATT_LAMBDA_MAX_NM: f64 = 1675.0;

/// One Gaussian OH- absorption peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OhPeak {
    /// Center wavelength, nm.
    pub center_nm: f64,
    /// Gaussian sigma, nm.
    pub width_nm: f64,
    /// Peak height at `oh_scale = 1`, dB/km.
    pub height_db_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttenuationModel {
    /// Rayleigh scattering coefficient, dB/km um^4.
    pub rayleigh_db_km_um4: f64,
    /// Infrared absorption edge amplitude, dB/km.
    pub ir_amplitude_db_km: f64,
    /// Infrared absorption edge decay constant, um.
    pub ir_decay_um: f64,
    /// OH- absorption peaks.
    pub oh_peaks: Vec<OhPeak>,
    /// Dimensionless multiplier for the OH- concentration.
    pub oh_scale: f64,
}

impl AttenuationModel {
    /// Calibrated default profile (OH- peaks at 1383 and 1240 nm, disabled
    /// until `oh_scale > 0`).
    pub fn default_smf() -> Self {
        AttenuationModel {
            rayleigh_db_km_um4: 0.940_411,
            ir_amplitude_db_km: 1.523_004e7,
            ir_decay_um: 31.229_353,
            oh_peaks: vec![
                OhPeak { center_nm: 1383.0, width_nm: 15.0, height_db_km: 1.0 },
                OhPeak { center_nm: 1240.0, width_nm: 10.0, height_db_km: 0.2 },
            ],
            oh_scale: 0.0,
        }
    }

    /// Same profile with a different OH- scale.
    pub fn with_oh_scale(mut self, oh_scale: f64) -> Self {
        self.oh_scale = oh_scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rayleigh_db_km_um4 < 0.0 || self.ir_amplitude_db_km < 0.0 || self.oh_scale < 0.0 {
            return Err(Error::Config("attenuation coefficients must be non-negative".into()));
        }
        if self.oh_peaks.iter().any(|p| p.width_nm <= 0.0 || p.height_db_km < 0.0) {
            return Err(Error::Config("OH peaks need positive width and non-negative height".into()));
        }
        Ok(())
    }

    /// Attenuation in dB/km at `lambda_nm`.
    pub fn alpha_db_km(&self, lambda_nm: f64) -> Result<f64> {
        if !(ATT_LAMBDA_MIN_NM..=ATT_LAMBDA_MAX_NM).contains(&lambda_nm) {
            return Err(Error::domain(
                "wavelength_nm",
                lambda_nm,
                ATT_LAMBDA_MIN_NM,
                ATT_LAMBDA_MAX_NM,
            ));
        }
        Ok(self.alpha_db_km_unchecked(lambda_nm))
    }

    pub(crate) fn alpha_db_km_unchecked(&self, lambda_nm: f64) -> f64 {
        let l_um = lambda_nm * 1e-3;
        let mut a = self.rayleigh_db_km_um4 / l_um.powi(4)
            + self.ir_amplitude_db_km * (-self.ir_decay_um / l_um).exp();
        for p in &self.oh_peaks {
            let d = (lambda_nm - p.center_nm) / p.width_nm;
            a += self.oh_scale * p.height_db_km * (-0.5 * d * d).exp();
        }
        a
    }

    /// Attenuation in natural units, 1/m.
    pub fn alpha_nat_per_m(&self, lambda_nm: f64) -> Result<f64> {
        Ok(db_per_km_to_nat_per_m(self.alpha_db_km(lambda_nm)?))
    }
}
