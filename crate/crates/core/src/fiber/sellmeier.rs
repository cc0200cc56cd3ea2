//! Three-term Sellmeier dispersion of the bulk glass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wavelength range (nm) over which the material model is evaluated.
pub const LAMBDA_MIN_NM: f64 = 1000.0;
pub const LAMBDA_MAX_NM: f64 = 1800.0;

/// Three-term Sellmeier coefficients: n^2(l) = 1 + sum b_j l^2 / (l^2 - l_j^2)
/// with `l` in micrometres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SellmeierCoefficients {
    /// Oscillator strengths (dimensionless).
    pub b: [f64; 3],
    /// Resonance wavelengths (um).
    pub l_um: [f64; 3],
}

impl SellmeierCoefficients {
    /// Fused silica (Malitson). The paper's germanium-doped core uses handbook
    /// coefficients that are not reproduced here; this is a calibrated
    /// stand-in with the doping handled by the geometry's index contrast.
    pub fn fused_silica() -> Self {
        SellmeierCoefficients {
            b: [0.696_166_3, 0.407_942_6, 0.897_479_4],
            l_um: [0.068_404_3, 0.116_241_4, 9.896_161],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l_um.iter().any(|&l| l <= 0.0) {
            return Err(Error::Config("Sellmeier resonance wavelengths must be positive".into()));
        }
        Ok(())
    }

    /// Refractive index at vacuum wavelength `lambda_nm`.
    pub fn index(&self, lambda_nm: f64) -> Result<f64> {
        if !(LAMBDA_MIN_NM..=LAMBDA_MAX_NM).contains(&lambda_nm) {
            return Err(Error::domain("wavelength_nm", lambda_nm, LAMBDA_MIN_NM, LAMBDA_MAX_NM));
        }
        Ok(self.index_unchecked(lambda_nm))
    }

    /// Index evaluation without the range check; used by finite-difference
    /// stencils that stay marginally inside the range themselves.
    pub(crate) fn index_unchecked(&self, lambda_nm: f64) -> f64 {
        let l2 = (lambda_nm / 1e3).powi(2);
        let mut s = 1.0;
        for j in 0..3 {
            s += self.b[j] * l2 / (l2 - self.l_um[j] * self.l_um[j]);
        }
        s.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn silica_index_at_1550() {
        let n = SellmeierCoefficients::fused_silica().index(1550.0).unwrap();
        assert!((n - 1.444).abs() < 1e-3, "n(1550) = {n}");
    }

    #[test]
    fn vacuum_limit() {
        let s = SellmeierCoefficients { b: [0.0; 3], l_um: [0.1, 0.2, 9.0] };
        assert_relative_eq!(s.index(1550.0).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn normal_dispersion() {
        let s = SellmeierCoefficients::fused_silica();
        assert!(s.index(1310.0).unwrap() > s.index(1550.0).unwrap());
    }

    #[test]
    fn out_of_range_rejected() {
        let s = SellmeierCoefficients::fused_silica();
        assert!(s.index(900.0).is_err());
        assert!(s.index(1900.0).is_err());
    }

    /// Self-consistency against a second, independently coded evaluator.
    #[test]
    fn matches_independent_evaluation() {
        let s = SellmeierCoefficients::fused_silica();
        // quasi-random sample of the supported range
        for k in 0..20 {
            let lam = 1010.0 + 780.0 * ((k as f64 * 0.618_033_988_749_895) % 1.0);
            let l = lam * 1e-3;
            // Horner-free direct sum written differently on purpose.
            let n2 = 1.0
                + s.b[0] / (1.0 - (s.l_um[0] / l) * (s.l_um[0] / l))
                + s.b[1] / (1.0 - (s.l_um[1] / l) * (s.l_um[1] / l))
                + s.b[2] / (1.0 - (s.l_um[2] / l) * (s.l_um[2] / l));
            let expected = n2.sqrt();
            let got = s.index(lam).unwrap();
            assert_relative_eq!(got, expected, max_relative = 1e-12);
        }
    }
}
