//! Wavelength-dependent fiber physics.
//!
//! A [`FiberProfile`] bundles the Sellmeier model, step-index geometry,
//! attenuation profile, Raman gain table and the nonlinear/Rayleigh anchor
//! values, and exposes every frequency-dependent quantity the interference
//! and QKD models consume. Profiles are immutable after construction and all
//! operations are pure, so values can be shared freely across threads.

mod attenuation;
mod geometry;
mod raman;
mod sellmeier;

pub use attenuation::{AttenuationModel, OhPeak, ATT_LAMBDA_MAX_NM, ATT_LAMBDA_MIN_NM};
pub use geometry::{marcuse_width_ratio, StepIndexGeometry};
pub use raman::{RamanGainTable, BUNDLED_SILICA_TABLE};
pub use sellmeier::{SellmeierCoefficients, LAMBDA_MAX_NM, LAMBDA_MIN_NM};

use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN, PLANCK, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::units::hz_to_nm;

/// Which propagation constant feeds the dispersion derivative.
///
/// The underlying model is ambiguous about whether the plotted dispersion
/// includes the waveguide contribution; both paths are available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DispersionModel {
    /// Material index only.
    Material,
    /// Material index plus the LP01 waveguide correction (default).
    #[default]
    MaterialPlusWaveguide,
}

/// Complete wavelength-dependent description of one fiber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberProfile {
    pub sellmeier: SellmeierCoefficients,
    pub geometry: StepIndexGeometry,
    pub attenuation: AttenuationModel,
    pub raman: RamanGainTable,
    /// Nonlinear coefficient anchor, 1/(W m) at `reference_wavelength_nm`.
    pub gamma_ref_per_w_m: f64,
    /// Rayleigh backscattering efficiency anchor, 1/m at the reference.
    pub rayleigh_ref_per_m: f64,
    /// Anchor wavelength for the two references, nm.
    pub reference_wavelength_nm: f64,
    pub dispersion_model: DispersionModel,
}

impl FiberProfile {
    /// The fiber used throughout: 10-um-core step-index with
    /// gamma(1550) = 1.3 /(W km) and Gamma(1550) = -40 dB/km.
    pub fn default_smf() -> Self {
        FiberProfile {
            sellmeier: SellmeierCoefficients::fused_silica(),
            geometry: StepIndexGeometry::default_smf(),
            attenuation: AttenuationModel::default_smf(),
            raman: RamanGainTable::default_silica(),
            gamma_ref_per_w_m: 1.3e-3,
            rayleigh_ref_per_m: 1e-4 / 1e3,
            reference_wavelength_nm: 1550.0,
            dispersion_model: DispersionModel::default(),
        }
    }

    /// Same fiber with a different OH- concentration.
    pub fn with_oh_scale(mut self, oh_scale: f64) -> Self {
        self.attenuation = self.attenuation.with_oh_scale(oh_scale);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.sellmeier.validate()?;
        self.geometry.validate()?;
        self.attenuation.validate()?;
        self.raman.validate()?;
        if self.gamma_ref_per_w_m <= 0.0
            || self.rayleigh_ref_per_m <= 0.0
            || self.reference_wavelength_nm <= 0.0
        {
            return Err(Error::Config("fiber reference values must be positive".into()));
        }
        Ok(())
    }

    /// Material refractive index from the Sellmeier model.
    pub fn refractive_index(&self, lambda_nm: f64) -> Result<f64> {
        self.sellmeier.index(lambda_nm)
    }

    /// Gaussian mode radius (um) and effective area (um^2).
    pub fn mode_field(&self, lambda_nm: f64) -> Result<(f64, f64)> {
        if !(LAMBDA_MIN_NM..=LAMBDA_MAX_NM).contains(&lambda_nm) {
            return Err(Error::domain("wavelength_nm", lambda_nm, LAMBDA_MIN_NM, LAMBDA_MAX_NM));
        }
        let w = self.geometry.mode_radius_um(&self.sellmeier, lambda_nm)?;
        Ok((w, std::f64::consts::PI * w * w))
    }

    /// Effective area, um^2.
    pub fn effective_area_um2(&self, lambda_nm: f64) -> Result<f64> {
        Ok(self.mode_field(lambda_nm)?.1)
    }

    /// Cross-mode effective area between the lateral profiles at the two
    /// wavelengths: the Gaussian overlap gives pi (w_i^2 + w_h^2) / 2.
    pub fn cross_effective_area_um2(&self, lambda_i_nm: f64, lambda_h_nm: f64) -> Result<f64> {
        let (wi, _) = self.mode_field(lambda_i_nm)?;
        let (wh, _) = self.mode_field(lambda_h_nm)?;
        Ok(std::f64::consts::PI * 0.5 * (wi * wi + wh * wh))
    }

    /// Effective index for the dispersion derivative.
    fn n_eff(&self, lambda_nm: f64) -> f64 {
        let n_clad = self.sellmeier.index_unchecked(lambda_nm);
        match self.dispersion_model {
            DispersionModel::Material => n_clad,
            DispersionModel::MaterialPlusWaveguide => {
                let n_core = n_clad * (1.0 + self.geometry.index_contrast);
                let b = self.geometry.b_parameter(&self.sellmeier, lambda_nm);
                (n_clad * n_clad + b * (n_core * n_core - n_clad * n_clad)).sqrt()
            }
        }
    }

    /// Group-velocity dispersion beta_2 in s^2/m, from central finite
    /// differences of beta(omega) = n_eff(omega) omega / c with relative
    /// step `rel_step` in omega (1e-4 by default).
    pub fn beta2_with_step(&self, lambda_nm: f64, rel_step: f64) -> Result<f64> {
        let omega = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / (lambda_nm * 1e-9);
        let d = rel_step * omega;
        let lam_of = |om: f64| 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / om * 1e9;
        // the stencil must stay inside the supported material range
        for om in [omega - d, omega + d] {
            let l = lam_of(om);
            if !(LAMBDA_MIN_NM..=LAMBDA_MAX_NM).contains(&l) {
                return Err(Error::domain("wavelength_nm", l, LAMBDA_MIN_NM, LAMBDA_MAX_NM));
            }
        }
        let beta = |om: f64| self.n_eff(lam_of(om)) * om / SPEED_OF_LIGHT;
        Ok((beta(omega + d) - 2.0 * beta(omega) + beta(omega - d)) / (d * d))
    }

    /// Group-velocity dispersion beta_2 in s^2/m at the default step.
    pub fn beta2(&self, lambda_nm: f64) -> Result<f64> {
        self.beta2_with_step(lambda_nm, 1e-4)
    }

    /// Single-polarization nonlinear coefficient, 1/(W m), scaling as
    /// (lambda A_eff)^-1 from the anchor value.
    pub fn gamma(&self, lambda_nm: f64) -> Result<f64> {
        let a_ref = self.effective_area_um2(self.reference_wavelength_nm)?;
        let a = self.effective_area_um2(lambda_nm)?;
        Ok(self.gamma_ref_per_w_m * (self.reference_wavelength_nm * a_ref) / (lambda_nm * a))
    }

    /// Manakov-averaged nonlinear coefficient (8/9) gamma, 1/(W m).
    pub fn gamma_eff(&self, lambda_nm: f64) -> Result<f64> {
        Ok(self.gamma(lambda_nm)? * 8.0 / 9.0)
    }

    /// Rayleigh backscattering efficiency, 1/m, scaling as lambda^-4.
    pub fn rayleigh_coeff(&self, lambda_nm: f64) -> Result<f64> {
        if !(LAMBDA_MIN_NM..=LAMBDA_MAX_NM).contains(&lambda_nm) {
            return Err(Error::domain("wavelength_nm", lambda_nm, LAMBDA_MIN_NM, LAMBDA_MAX_NM));
        }
        Ok(self.rayleigh_ref_per_m * (self.reference_wavelength_nm / lambda_nm).powi(4))
    }

    /// Attenuation in natural units, 1/m.
    pub fn alpha(&self, lambda_nm: f64) -> Result<f64> {
        self.attenuation.alpha_nat_per_m(lambda_nm)
    }

    /// Attenuation in dB/km (I/O form).
    pub fn alpha_db_km(&self, lambda_nm: f64) -> Result<f64> {
        self.attenuation.alpha_db_km(lambda_nm)
    }

    /// Spontaneous Raman scattering efficiency from a pump at `f_h` into the
    /// slot of width `b_ch_hz` at `f_i`, in 1/m:
    ///
    /// eta = g(|df|) h f_i B_ch [n_th + 1 (Stokes) | n_th (anti-Stokes)]
    ///       (lambda_ref A_ref) / (lambda_i A_eff,i,h),
    ///
    /// so that eta P_h is the power per metre scattered into the slot. The
    /// photon-energy factor makes the units close; the table normalization
    /// is divided out through the (lambda A)^-1 ratio. Detunings beyond the
    /// table support return exactly zero.
    pub fn sprs_efficiency(&self, f_i_hz: f64, f_h_hz: f64, b_ch_hz: f64) -> Result<f64> {
        if f_i_hz == f_h_hz {
            return Err(Error::Contract("SpRS efficiency needs f_i != f_h".into()));
        }
        let df = f_i_hz - f_h_hz;
        let g = self.raman.gain(df);
        if g == 0.0 {
            return Ok(0.0);
        }
        let x = PLANCK * df.abs() / (BOLTZMANN * self.raman.temperature_k);
        let n_th = 1.0 / x.exp_m1();
        let phonon = if f_i_hz > f_h_hz { n_th } else { n_th + 1.0 };
        let lambda_i = hz_to_nm(f_i_hz);
        let lambda_h = hz_to_nm(f_h_hz);
        let a_cross = self.cross_effective_area_um2(lambda_i, lambda_h)?;
        let scale = (self.raman.ref_pump_nm * self.raman.ref_area_um2) / (lambda_i * a_cross);
        Ok(g * PLANCK * f_i_hz * b_ch_hz * phonon * scale)
    }

    /// True when |f_i - f_h| exceeds the Raman table support (the efficiency
    /// is then reported as exactly zero).
    pub fn beyond_raman_support(&self, f_i_hz: f64, f_h_hz: f64) -> bool {
        (f_i_hz - f_h_hz).abs() > self.raman.max_detuning_hz()
    }
}
