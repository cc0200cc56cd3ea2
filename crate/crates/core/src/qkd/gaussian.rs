//! Two-mode Gaussian covariance matrices, symplectic eigenvalues and the
//! Holevo bound.
//!
//! Covariance matrices appear in the block form
//!
//! ```text
//! [ dg(w_a, w_b)    dg(p_a, -p_b) ]
//! [ dg(p_a, -p_b)   dg(f_a, f_b)  ]
//! ```
//!
//! with quadrature ordering (x1, p1, x2, p2); the symmetric case
//! w_a = w_b = w, p_a = p_b = psi, f_a = f_b = phi recovers the familiar
//! [[w I, psi Z], [psi Z, phi I]] structure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// General-parameter two-mode covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianCm {
    pub omega_a: f64,
    pub omega_b: f64,
    pub psi_a: f64,
    pub psi_b: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

impl GaussianCm {
    /// Symmetric [[w I, psi Z], [psi Z, phi I]] form.
    pub fn symmetric(omega: f64, psi: f64, phi: f64) -> Self {
        GaussianCm { omega_a: omega, omega_b: omega, psi_a: psi, psi_b: psi, phi_a: phi, phi_b: phi }
    }

    /// Dense 4x4 matrix in (x1, p1, x2, p2) ordering, row-major.
    pub fn to_matrix(self) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        m[0][0] = self.omega_a;
        m[1][1] = self.omega_b;
        m[2][2] = self.phi_a;
        m[3][3] = self.phi_b;
        m[0][2] = self.psi_a;
        m[2][0] = self.psi_a;
        m[1][3] = -self.psi_b;
        m[3][1] = -self.psi_b;
        m
    }

    /// Build from a dense symmetric matrix of the supported sparsity
    /// pattern.
    pub fn from_matrix(m: &[[f64; 4]; 4]) -> Result<Self> {
        for r in 0..4 {
            for c in 0..4 {
                if (m[r][c] - m[c][r]).abs() > 1e-9 * m[r][c].abs().max(1.0) {
                    return Err(Error::Contract(format!(
                        "covariance matrix not symmetric at ({r}, {c})"
                    )));
                }
            }
        }
        let zero_pattern =
            [(0, 1), (0, 3), (1, 2), (2, 3)].iter().all(|&(r, c)| m[r][c] == 0.0);
        if !zero_pattern {
            return Err(Error::Contract(
                "covariance matrix outside the dg/dg-Z block pattern".into(),
            ));
        }
        Ok(GaussianCm {
            omega_a: m[0][0],
            omega_b: m[1][1],
            psi_a: m[0][2],
            psi_b: -m[1][3],
            phi_a: m[2][2],
            phi_b: m[3][3],
        })
    }

    /// Symplectic eigenvalues (lambda_plus >= lambda_minus) from the
    /// closed-form quadratic in lambda^2:
    ///
    /// lambda^4 - b' lambda^2 + c' = 0, with
    /// b' = f_a f_b + w_a w_b - 2 p_a p_b and
    /// c' = (f_a f_b - p_a p_b)(w_a w_b - p_a p_b)
    ///      - (p_a f_b - w_a p_b)(p_a w_b - f_a p_b).
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        let b = self.phi_a * self.phi_b + self.omega_a * self.omega_b - 2.0 * self.psi_a * self.psi_b;
        let c = (self.phi_a * self.phi_b - self.psi_a * self.psi_b)
            * (self.omega_a * self.omega_b - self.psi_a * self.psi_b)
            - (self.psi_a * self.phi_b - self.omega_a * self.psi_b)
                * (self.psi_a * self.omega_b - self.phi_a * self.psi_b);
        let disc = (b * b - 4.0 * c).max(0.0).sqrt();
        let lp = (0.5 * (b + disc)).max(0.0).sqrt();
        // evaluate the small root as c / lambda_plus^2 to avoid cancellation
        let lm = if lp > 0.0 { (c.max(0.0)).sqrt() / lp } else { 0.0 };
        (lp, lm)
    }

    /// Physicality check: both symplectic eigenvalues above 1 - tol.
    pub fn is_physical(&self, tol: f64) -> bool {
        let (lp, lm) = self.symplectic_eigenvalues();
        lp >= 1.0 - tol && lm >= 1.0 - tol
    }
}

/// Bosonic entropy kernel
/// h2(x) = ((x+1)/2) log2((x+1)/2) - ((x-1)/2) log2((x-1)/2), with
/// h2(1) = 0 by continuity; evaluated through ln_1p near x = 1.
pub fn h2(x: f64) -> f64 {
    if x <= 1.0 {
        return 0.0;
    }
    let u = 0.5 * (x - 1.0);
    ((1.0 + u) * u.ln_1p() - u * u.ln()) / std::f64::consts::LN_2
}

/// Holevo bound chi = h2(lp) + h2(lm) - h2(ltp) - h2(ltm), bits.
pub fn holevo_bound(lp: f64, lm: f64, lt_plus: f64, lt_minus: f64) -> f64 {
    h2(lp) + h2(lm) - h2(lt_plus) - h2(lt_minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vacuum_state() {
        let cm = GaussianCm::symmetric(1.0, 0.0, 1.0);
        let (lp, lm) = cm.symplectic_eigenvalues();
        assert_relative_eq!(lp, 1.0, max_relative = 1e-14);
        assert_relative_eq!(lm, 1.0, max_relative = 1e-14);
        assert_eq!(holevo_bound(1.0, 1.0, 1.0, 1.0), 0.0);
    }

    #[test]
    fn h2_limit_and_large_x() {
        assert_eq!(h2(1.0), 0.0);
        assert_eq!(h2(0.5), 0.0);
        assert!(h2(1.0 + 1e-13) >= 0.0);
        // h2(x) -> log2(x) + log2(e) - 1 for large x
        let x = 1e6f64;
        let asym = x.log2() + std::f64::consts::E.log2() - 1.0;
        assert!((h2(x) - asym).abs() < 1e-6);
    }

    #[test]
    fn matrix_roundtrip() {
        let cm = GaussianCm {
            omega_a: 1.5,
            omega_b: 1.4,
            psi_a: 0.3,
            psi_b: 0.25,
            phi_a: 2.0,
            phi_b: 2.2,
        };
        let m = cm.to_matrix();
        assert_eq!(GaussianCm::from_matrix(&m).unwrap(), cm);
        let mut bad = m;
        bad[0][1] = 0.1;
        assert!(GaussianCm::from_matrix(&bad).is_err());
    }

    #[test]
    fn known_two_mode_squeezed_values() {
        // standard form: lambda^2 solves the quadratic with
        // Delta = w^2 + phi^2 - 2 psi^2, det = (w phi - psi^2)^2
        let (w, psi, phi) = (2.0, 1.2, 1.8);
        let cm = GaussianCm::symmetric(w, psi, phi);
        let (lp, lm) = cm.symplectic_eigenvalues();
        let delta = w * w + phi * phi - 2.0 * psi * psi;
        let det = (w * phi - psi * psi).powi(2);
        let exp_lp = (0.5 * (delta + (delta * delta - 4.0 * det).sqrt())).sqrt();
        let exp_lm = (0.5 * (delta - (delta * delta - 4.0 * det).sqrt())).sqrt();
        assert_relative_eq!(lp, exp_lp, max_relative = 1e-12);
        assert_relative_eq!(lm, exp_lm, max_relative = 1e-12);
    }
}
