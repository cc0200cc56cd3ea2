//! Step-index geometry and the Gaussian LP01 mode approximation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::sellmeier::SellmeierCoefficients;

/// Step-index core geometry. The cladding index comes from the Sellmeier
/// model; the core index is `n_clad * (1 + index_contrast)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepIndexGeometry {
    /// Core radius, um.
    pub core_radius_um: f64,
    /// Relative core-to-cladding index ratio, e.g. 0.0031.
    pub index_contrast: f64,
}

impl StepIndexGeometry {
    /// The considered fiber: 10-um core diameter, 0.31 % contrast.
    pub fn default_smf() -> Self {
        StepIndexGeometry { core_radius_um: 5.0, index_contrast: 0.0031 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.core_radius_um <= 0.0 {
            return Err(Error::Config("core radius must be positive".into()));
        }
        if self.index_contrast <= 0.0 || self.index_contrast >= 0.05 {
            return Err(Error::Config("index contrast must lie in (0, 0.05)".into()));
        }
        Ok(())
    }

    pub fn numerical_aperture(&self, sellmeier: &SellmeierCoefficients, lambda_nm: f64) -> f64 {
        let n_clad = sellmeier.index_unchecked(lambda_nm);
        let n_core = n_clad * (1.0 + self.index_contrast);
        (n_core * n_core - n_clad * n_clad).sqrt()
    }

    /// Normalized frequency V = 2 pi a NA / lambda.
    pub fn v_number(&self, sellmeier: &SellmeierCoefficients, lambda_nm: f64) -> f64 {
        let na = self.numerical_aperture(sellmeier, lambda_nm);
        2.0 * std::f64::consts::PI * self.core_radius_um * na / (lambda_nm * 1e-3)
    }

    /// Gaussian mode-field radius per the Marcuse fit
    /// w/a = 0.65 + 1.619 V^-3/2 + 2.879 V^-6, um.
    pub fn mode_radius_um(
        &self,
        sellmeier: &SellmeierCoefficients,
        lambda_nm: f64,
    ) -> Result<f64> {
        let v = self.v_number(sellmeier, lambda_nm);
        if v <= 0.0 {
            return Err(Error::Config(format!("invalid geometry: V = {v}")));
        }
        if v >= 4.0 {
            return Err(Error::Domain { quantity: "V number", value: v, min: 0.0, max: 4.0 });
        }
        Ok(self.core_radius_um * marcuse_width_ratio(v))
    }

    /// Normalized LP01 propagation parameter b(V), Rudolph-Neumann fit.
    pub fn b_parameter(&self, sellmeier: &SellmeierCoefficients, lambda_nm: f64) -> f64 {
        let v = self.v_number(sellmeier, lambda_nm);
        let b = 1.1428 - 0.996 / v;
        (b * b).clamp(0.0, 1.0)
    }
}

/// Marcuse fit for the Gaussian width of the LP01 mode.
pub fn marcuse_width_ratio(v: f64) -> f64 {
    0.65 + 1.619 * v.powf(-1.5) + 2.879 * v.powi(-6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn marcuse_at_v_2p2() {
        // direct evaluation of the fit
        let expected = 0.65 + 1.619 * 2.2f64.powf(-1.5) + 2.879 * 2.2f64.powi(-6);
        assert_relative_eq!(marcuse_width_ratio(2.2), expected, max_relative = 1e-14);
        assert!((marcuse_width_ratio(2.2) - 1.1715).abs() < 1e-3);
    }

    #[test]
    fn mode_radius_scales_with_core() {
        let s = SellmeierCoefficients::fused_silica();
        let g1 = StepIndexGeometry { core_radius_um: 5.0, index_contrast: 0.0031 };
        // doubling the core at a quarter of the contrast keeps V fixed
        let g2 = StepIndexGeometry { core_radius_um: 10.0, index_contrast: 0.0031 / 4.0 };
        let v1 = g1.v_number(&s, 1550.0);
        let v2 = g2.v_number(&s, 1550.0);
        assert_relative_eq!(v1, v2, max_relative = 2e-3);
        let w1 = g1.mode_radius_um(&s, 1550.0).unwrap();
        let w2 = g2.mode_radius_um(&s, 1550.0).unwrap();
        assert!(w2 > 1.9 * w1 && w2 < 2.1 * w1);
    }

    #[test]
    fn contrast_bounds_enforced() {
        assert!(StepIndexGeometry { core_radius_um: 5.0, index_contrast: 0.06 }
            .validate()
            .is_err());
        assert!(StepIndexGeometry { core_radius_um: -1.0, index_contrast: 0.003 }
            .validate()
            .is_err());
    }
}
